//! The versioned mechanics table.
//!
//! The shipped table is compiled in from `defaults/mechanics.toml`. A different
//! table may be installed once at startup, before the first lookup.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::types::Item;
use crate::error::{Error, Result};
use crate::world::TileKind;

pub const DEFAULT_TABLE: &str = include_str!("../../defaults/mechanics.toml");

static INSTALLED: OnceLock<Mechanics> = OnceLock::new();

/// The active table: the installed one, or the shipped defaults.
pub fn mechanics() -> &'static Mechanics {
    INSTALLED.get_or_init(|| Mechanics::from_toml(DEFAULT_TABLE).expect("shipped mechanics table parses"))
}

/// Replaces the shipped defaults. Fails once any lookup has happened.
pub fn install(table: Mechanics) -> Result<()> {
    INSTALLED
        .set(table)
        .map_err(|_| Error::Defaults("mechanics table already in use".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerRules {
    pub max_stat: i32,
    pub max_item: u8,
    pub hunger_threshold: f32,
    pub thirst_threshold: f32,
    pub fatigue_threshold: f32,
    pub fatigue_recover_threshold: f32,
    pub recover_threshold: f32,
    pub degen_threshold: f32,
    pub sleeping_decay_rate: f32,
    pub sleeping_recover_rate: f32,
    pub sleeping_degen_rate: f32,
    pub wake_light: f32,
    pub nearby_radius: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaylightRules {
    pub cycle_length: u32,
    pub phase_offset: f64,
    pub night_threshold: f32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombatRules {
    pub unarmed_damage: i32,
    pub wood_sword_damage: i32,
    pub stone_sword_damage: i32,
    pub iron_sword_damage: i32,
    pub zombie_damage: i32,
    pub zombie_sleeping_damage: i32,
    pub zombie_cooldown: i32,
    pub arrow_damage: i32,
    pub skeleton_reload: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoodRules {
    pub cow: i32,
    pub plant: i32,
    pub water: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantRules {
    pub ripe_after: u32,
    pub health: i32,
    pub zombie_damage: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobRules {
    pub cow_cap: usize,
    pub zombie_cap: usize,
    pub skeleton_cap: usize,
    pub arrow_cap: usize,
    pub cow_health: i32,
    pub zombie_health: i32,
    pub skeleton_health: i32,
    pub cow_move_prob: f64,
    pub zombie_chase_range: i32,
    pub zombie_chase_prob: f64,
    pub zombie_long_axis_prob: f64,
    pub skeleton_retreat_range: i32,
    pub skeleton_retreat_prob: f64,
    pub skeleton_shoot_range: i32,
    pub skeleton_shoot_prob: f64,
    pub skeleton_chase_range: i32,
    pub skeleton_chase_prob: f64,
    pub skeleton_wander_prob: f64,
    pub spawn_radius: i32,
    pub despawn_distance: i32,
    pub cow_spawn_prob: f64,
    pub cow_min_distance: i32,
    pub cow_despawn_prob: f64,
    pub zombie_spawn_prob_day: f64,
    pub zombie_spawn_prob_night: f64,
    pub zombie_min_distance: i32,
    pub zombie_despawn_prob: f64,
    pub skeleton_spawn_prob: f64,
    pub skeleton_min_distance: i32,
    pub skeleton_despawn_prob: f64,
    pub initial_cow_prob: f64,
    pub initial_zombie_prob: f64,
    pub initial_skeleton_prob: f64,
    pub initial_cow_min_distance: i32,
    pub initial_zombie_min_distance: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptionRules {
    pub window: usize,
    pub stay_run: usize,
    pub move_displacement: i32,
    pub approach_radius: i32,
    pub explore_new_tiles: usize,
    pub shelter_pocket: usize,
    pub tunnel_gap: usize,
    pub block_arrow_range: i32,
}

/// What harvesting a material yields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Yield {
    Item(Item),
    Drink,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollectRule {
    pub require: Vec<Item>,
    pub receive: Yield,
    pub leaves: TileKind,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaceRule {
    pub material: TileKind,
    pub uses: Vec<(Item, u8)>,
    pub targets: Vec<TileKind>,
    pub nearby: Vec<TileKind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MakeRule {
    pub tool: Item,
    pub uses: Vec<(Item, u8)>,
    pub nearby: Vec<TileKind>,
}

/// Parsed and resolved mechanics table.
#[derive(Clone, Debug, PartialEq)]
pub struct Mechanics {
    pub version: u32,
    pub player: PlayerRules,
    pub daylight: DaylightRules,
    pub combat: CombatRules,
    pub food: FoodRules,
    pub plants: PlantRules,
    pub mobs: MobRules,
    pub captions: CaptionRules,
    collect: [Option<CollectRule>; TileKind::COUNT],
    place: BTreeMap<TileKind, PlaceRule>,
    make: BTreeMap<Item, MakeRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    version: u32,
    player: PlayerRules,
    daylight: DaylightRules,
    combat: CombatRules,
    food: FoodRules,
    plants: PlantRules,
    mobs: MobRules,
    captions: CaptionRules,
    collect: BTreeMap<String, RawCollect>,
    place: BTreeMap<String, RawPlace>,
    make: BTreeMap<String, RawMake>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCollect {
    #[serde(default)]
    require: Vec<String>,
    receive: String,
    leaves: String,
    #[serde(default = "one")]
    probability: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlace {
    uses: BTreeMap<String, u8>,
    #[serde(rename = "where")]
    targets: Vec<String>,
    #[serde(default)]
    nearby: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMake {
    uses: BTreeMap<String, u8>,
    #[serde(default)]
    nearby: Vec<String>,
}

fn one() -> f64 {
    1.0
}

fn tile(name: &str) -> Result<TileKind> {
    TileKind::from_name(name).ok_or_else(|| Error::Defaults(format!("unknown material {name:?}")))
}

fn item(name: &str) -> Result<Item> {
    Item::from_name(name).ok_or_else(|| Error::Defaults(format!("unknown item {name:?}")))
}

fn costs(uses: &BTreeMap<String, u8>) -> Result<Vec<(Item, u8)>> {
    let mut out = uses
        .iter()
        .map(|(k, &v)| Ok((item(k)?, v)))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn tiles(names: &[String]) -> Result<Vec<TileKind>> {
    names.iter().map(|n| tile(n)).collect()
}

impl Mechanics {
    pub fn from_toml(text: &str) -> Result<Mechanics> {
        let raw: RawTable = toml::from_str(text).map_err(|e| Error::Defaults(e.to_string()))?;

        let mut collect: [Option<CollectRule>; TileKind::COUNT] = Default::default();
        for (name, rule) in &raw.collect {
            let receive = match rule.receive.as_str() {
                "drink" => Yield::Drink,
                other => Yield::Item(item(other)?),
            };
            if !(0.0..=1.0).contains(&rule.probability) {
                return Err(Error::Defaults(format!("collect.{name}: probability out of range")));
            }
            collect[tile(name)? as usize] = Some(CollectRule {
                require: rule.require.iter().map(|r| item(r)).collect::<Result<_>>()?,
                receive,
                leaves: tile(&rule.leaves)?,
                probability: rule.probability,
            });
        }

        let mut place = BTreeMap::new();
        for (name, rule) in &raw.place {
            let material = tile(name)?;
            place.insert(
                material,
                PlaceRule {
                    material,
                    uses: costs(&rule.uses)?,
                    targets: tiles(&rule.targets)?,
                    nearby: tiles(&rule.nearby)?,
                },
            );
        }
        for needed in [TileKind::Stone, TileKind::Table, TileKind::Furnace, TileKind::Plant] {
            if !place.contains_key(&needed) {
                return Err(Error::Defaults(format!("missing place.{}", needed.name())));
            }
        }

        let mut make = BTreeMap::new();
        for (name, rule) in &raw.make {
            let tool = item(name)?;
            make.insert(
                tool,
                MakeRule {
                    tool,
                    uses: costs(&rule.uses)?,
                    nearby: tiles(&rule.nearby)?,
                },
            );
        }
        for tool in &Item::ALL[6..] {
            if !make.contains_key(tool) {
                return Err(Error::Defaults(format!("missing make.{}", tool.name())));
            }
        }

        if raw.daylight.cycle_length == 0 {
            return Err(Error::Defaults("daylight.cycle_length must be positive".into()));
        }

        Ok(Mechanics {
            version: raw.version,
            player: raw.player,
            daylight: raw.daylight,
            combat: raw.combat,
            food: raw.food,
            plants: raw.plants,
            mobs: raw.mobs,
            captions: raw.captions,
            collect,
            place,
            make,
        })
    }

    pub fn load(path: &Path) -> Result<Mechanics> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Mechanics::from_toml(&text)
    }

    #[inline]
    pub fn collect_rule(&self, material: TileKind) -> Option<&CollectRule> {
        self.collect[material as usize].as_ref()
    }

    pub fn place_rule(&self, material: TileKind) -> Option<&PlaceRule> {
        self.place.get(&material)
    }

    pub fn make_rule(&self, tool: Item) -> Option<&MakeRule> {
        self.make.get(&tool)
    }

    /// Daylight in `[0, 1]` after `step` steps.
    pub fn daylight(&self, step: u32) -> f32 {
        let cycle = self.daylight.cycle_length as f64;
        let progress = (step as f64 / cycle).fract() + self.daylight.phase_offset;
        (1.0 - (std::f64::consts::PI * progress).cos().abs().powi(3)) as f32
    }

    /// Damage dealt by the player's best sword.
    pub fn player_damage(&self, inventory: &[u8; Item::COUNT]) -> i32 {
        let c = &self.combat;
        let mut damage = c.unarmed_damage;
        for (tool, d) in [
            (Item::WoodSword, c.wood_sword_damage),
            (Item::StoneSword, c.stone_sword_damage),
            (Item::IronSword, c.iron_sword_damage),
        ] {
            if inventory[tool.index()] > 0 {
                damage = damage.max(d);
            }
        }
        damage
    }
}
