use serde::{Deserialize, Serialize};

use super::defaults::mechanics;
use super::types::{AchievementSet, Item};
use crate::error::{Error, Result};
use crate::seed::{Seed, Stream, StreamRng};
use crate::world::{generate_world, Direction, Pos, TileKind, WorldGrid};

pub const MAX_COWS: usize = 4;
pub const MAX_ZOMBIES: usize = 4;
pub const MAX_SKELETONS: usize = 2;
pub const MAX_ARROWS: usize = 4;

/// Bitmask over [`TileKind`] discriminants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileMask(u16);

impl TileMask {
    pub const fn of(kinds: &[TileKind]) -> TileMask {
        let mut bits = 0u16;
        let mut i = 0;
        while i < kinds.len() {
            bits |= 1 << kinds[i] as u16;
            i += 1;
        }
        TileMask(bits)
    }

    #[inline]
    pub const fn contains(self, kind: TileKind) -> bool {
        self.0 & (1 << kind as u16) != 0
    }

    pub const fn with(self, kind: TileKind) -> TileMask {
        TileMask(self.0 | 1 << kind as u16)
    }
}

pub const GROUND: TileMask = TileMask::of(&[TileKind::Grass, TileKind::Sand, TileKind::Path]);
pub const TUNNEL: TileMask = TileMask::of(&[TileKind::Path]);
pub const ARROW_SPACE: TileMask = TileMask::of(&[
    TileKind::Grass,
    TileKind::Sand,
    TileKind::Path,
    TileKind::Water,
    TileKind::Lava,
]);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub death_penalty_enabled: bool,
    /// Added to the reward on the step health reaches zero.
    pub death_penalty: f64,
    /// Health loss from unmet needs.
    pub health_decay_enabled: bool,
    /// Food, drink and energy decay.
    pub survival_decay_enabled: bool,
    pub mobs_enabled: bool,
    /// Lava is enterable (and lethal).
    pub hazards_enabled: bool,
    pub episode_limit: u32,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            death_penalty_enabled: false,
            death_penalty: -10.0,
            health_decay_enabled: true,
            survival_decay_enabled: true,
            mobs_enabled: true,
            hazards_enabled: true,
            episode_limit: 10_000,
        }
    }
}

impl EnvConfig {
    /// Dataset generation: defaults plus the death penalty.
    pub fn expert() -> Self {
        EnvConfig {
            death_penalty_enabled: true,
            ..Default::default()
        }
    }

    /// No decay of any kind, no mobs, no lava.
    pub fn peaceful() -> Self {
        EnvConfig {
            health_decay_enabled: false,
            survival_decay_enabled: false,
            mobs_enabled: false,
            hazards_enabled: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.episode_limit == 0 {
            return Err(Error::InvalidConfig("episode_limit must be at least 1".into()));
        }
        if !self.death_penalty.is_finite() {
            return Err(Error::InvalidConfig("death_penalty must be finite".into()));
        }
        Ok(())
    }

    pub fn player_space(&self) -> TileMask {
        if self.hazards_enabled {
            GROUND.with(TileKind::Lava)
        } else {
            GROUND
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum DamageCause {
    Zombie = 1,
    Arrow = 2,
    Lava = 3,
    Starvation = 4,
}

impl DamageCause {
    pub fn from_u8(v: u8) -> Option<DamageCause> {
        match v {
            1 => Some(DamageCause::Zombie),
            2 => Some(DamageCause::Arrow),
            3 => Some(DamageCause::Lava),
            4 => Some(DamageCause::Starvation),
            _ => None,
        }
    }
}

/// Damage received during the most recent step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Damage {
    pub cause: DamageCause,
    pub amount: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerState {
    pub pos: Pos,
    pub facing: Direction,
    pub health: i32,
    pub food: i32,
    pub drink: i32,
    pub energy: i32,
    pub recover: f32,
    pub hunger: f32,
    pub thirst: f32,
    pub fatigue: f32,
    pub sleeping: bool,
    pub inventory: [u8; Item::COUNT],
    pub last_damage: Option<Damage>,
}

impl PlayerState {
    pub fn new(pos: Pos) -> Self {
        let max = mechanics().player.max_stat;
        PlayerState {
            pos,
            facing: Direction::Down,
            health: max,
            food: max,
            drink: max,
            energy: max,
            recover: 0.0,
            hunger: 0.0,
            thirst: 0.0,
            fatigue: 0.0,
            sleeping: false,
            inventory: [0; Item::COUNT],
            last_damage: None,
        }
    }

    #[inline]
    pub fn has(&self, item: Item) -> u8 {
        self.inventory[item.index()]
    }

    pub fn vitals(&self) -> [i32; 4] {
        [self.health, self.food, self.drink, self.energy]
    }

    pub fn counters(&self) -> [f32; 4] {
        [self.recover, self.hunger, self.thirst, self.fatigue]
    }

    #[inline]
    pub fn target(&self) -> Pos {
        self.pos.step(self.facing)
    }

    pub(crate) fn hurt(&mut self, cause: DamageCause, amount: i32) {
        self.health -= amount;
        let total = self.last_damage.map_or(0, |d| d.amount) + amount;
        self.last_damage = Some(Damage { cause, amount: total });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobKind {
    Cow,
    Zombie,
    Skeleton,
    Arrow,
}

impl MobKind {
    pub const ALL: [MobKind; 4] = [MobKind::Cow, MobKind::Zombie, MobKind::Skeleton, MobKind::Arrow];

    pub fn name(self) -> &'static str {
        match self {
            MobKind::Cow => "cow",
            MobKind::Zombie => "zombie",
            MobKind::Skeleton => "skeleton",
            MobKind::Arrow => "arrow",
        }
    }

    pub fn from_name(name: &str) -> Option<MobKind> {
        MobKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn slots(self) -> usize {
        match self {
            MobKind::Cow => MAX_COWS,
            MobKind::Zombie => MAX_ZOMBIES,
            MobKind::Skeleton => MAX_SKELETONS,
            MobKind::Arrow => MAX_ARROWS,
        }
    }

    /// Code used in the per-cell mob map; 0 is empty and 1 the player.
    pub fn map_code(self) -> u8 {
        match self {
            MobKind::Cow => 2,
            MobKind::Zombie => 3,
            MobKind::Skeleton => 4,
            MobKind::Arrow => 5,
        }
    }

    pub fn space(self) -> TileMask {
        match self {
            MobKind::Cow | MobKind::Zombie => GROUND,
            MobKind::Skeleton => TUNNEL,
            MobKind::Arrow => ARROW_SPACE,
        }
    }
}

pub const PLAYER_MAP_CODE: u8 = 1;

/// A creature or projectile. `cooldown` is the zombie attack cooldown or the
/// skeleton reload timer; `facing` is the flight direction for arrows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mob {
    pub id: u32,
    pub pos: Pos,
    pub health: i32,
    pub cooldown: i32,
    pub facing: Direction,
}

/// Fixed slots per kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobs {
    pub cows: [Option<Mob>; MAX_COWS],
    pub zombies: [Option<Mob>; MAX_ZOMBIES],
    pub skeletons: [Option<Mob>; MAX_SKELETONS],
    pub arrows: [Option<Mob>; MAX_ARROWS],
}

impl Mobs {
    pub fn slots(&self, kind: MobKind) -> &[Option<Mob>] {
        match kind {
            MobKind::Cow => &self.cows,
            MobKind::Zombie => &self.zombies,
            MobKind::Skeleton => &self.skeletons,
            MobKind::Arrow => &self.arrows,
        }
    }

    pub fn slots_mut(&mut self, kind: MobKind) -> &mut [Option<Mob>] {
        match kind {
            MobKind::Cow => &mut self.cows,
            MobKind::Zombie => &mut self.zombies,
            MobKind::Skeleton => &mut self.skeletons,
            MobKind::Arrow => &mut self.arrows,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (MobKind, &Mob)> {
        MobKind::ALL
            .into_iter()
            .flat_map(move |k| self.slots(k).iter().flatten().map(move |m| (k, m)))
    }

    pub fn count(&self, kind: MobKind) -> usize {
        self.slots(kind).iter().flatten().count()
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The mob standing on `pos`, as (kind, slot).
    #[inline]
    pub fn at(&self, pos: Pos) -> Option<(MobKind, usize)> {
        for kind in MobKind::ALL {
            for (i, m) in self.slots(kind).iter().enumerate() {
                if matches!(m, Some(m) if m.pos == pos) {
                    return Some((kind, i));
                }
            }
        }
        None
    }

    pub fn get(&self, kind: MobKind, slot: usize) -> Option<&Mob> {
        self.slots(kind).get(slot).and_then(Option::as_ref)
    }

    pub fn find_id(&self, id: u32) -> Option<(MobKind, &Mob)> {
        self.iter().find(|(_, m)| m.id == id)
    }

    /// Puts a mob into the first free slot; `false` when the kind is full.
    pub fn insert(&mut self, kind: MobKind, mob: Mob, cap: usize) -> bool {
        if self.count(kind) >= cap {
            return false;
        }
        match self.slots_mut(kind).iter_mut().find(|s| s.is_none()) {
            Some(slot) => {
                *slot = Some(mob);
                true
            }
            None => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub seed: u64,
    pub config: EnvConfig,
    pub grid: WorldGrid,
    pub player: PlayerState,
    pub mobs: Mobs,
    pub achievements: AchievementSet,
    pub light_level: f32,
    pub step_count: u32,
    pub rng: StreamRng,
    pub next_mob_id: u32,
    pub done: bool,
}

impl EnvState {
    pub fn reset(seed: u64, config: EnvConfig) -> Result<EnvState> {
        config.validate()?;
        let grid = generate_world(Seed::new(seed, Stream::Terrain))?;
        let mut state = EnvState {
            seed,
            player: PlayerState::new(grid.spawn_point),
            grid,
            mobs: Mobs::default(),
            achievements: AchievementSet::EMPTY,
            light_level: mechanics().daylight(0),
            step_count: 0,
            rng: Seed::new(seed, Stream::Mobs).rng(),
            next_mob_id: 1,
            done: false,
            config,
        };
        if state.config.mobs_enabled {
            state.populate();
        }
        Ok(state)
    }

    /// Initial creatures, one uniform draw per cell, then a capped subset.
    fn populate(&mut self) {
        let rules = &mechanics().mobs;
        let spawn = self.grid.spawn_point;
        let mut cows = Vec::new();
        let mut zombies = Vec::new();
        let mut skeletons = Vec::new();
        for pos in WorldGrid::positions() {
            let u = self.rng.uniform();
            let dist = pos.chebyshev(spawn);
            match self.grid.get(pos) {
                Some(TileKind::Grass) => {
                    if dist > rules.initial_cow_min_distance && u < rules.initial_cow_prob {
                        cows.push(pos);
                    } else if dist > rules.initial_zombie_min_distance && u > 1.0 - rules.initial_zombie_prob {
                        zombies.push(pos);
                    }
                }
                Some(TileKind::Path) if u < rules.initial_skeleton_prob => skeletons.push(pos),
                _ => {}
            }
        }
        for (kind, mut cells, cap, health) in [
            (MobKind::Cow, cows, rules.cow_cap, rules.cow_health),
            (MobKind::Zombie, zombies, rules.zombie_cap, rules.zombie_health),
            (MobKind::Skeleton, skeletons, rules.skeleton_cap, rules.skeleton_health),
        ] {
            let take = cap.min(kind.slots()).min(cells.len());
            for i in 0..take {
                let j = i + self.rng.below((cells.len() - i) as u32) as usize;
                cells.swap(i, j);
                let mob = self.new_mob(cells[i], health, Direction::Down);
                self.mobs.insert(kind, mob, cap);
            }
        }
    }

    pub(crate) fn new_mob(&mut self, pos: Pos, health: i32, facing: Direction) -> Mob {
        let id = self.next_mob_id;
        self.next_mob_id += 1;
        Mob {
            id,
            pos,
            health,
            cooldown: 0,
            facing,
        }
    }

    /// Cell is inside the map, in `space`, and holds neither the player nor a mob.
    #[inline]
    pub fn is_free(&self, pos: Pos, space: TileMask) -> bool {
        match self.grid.get(pos) {
            Some(t) => space.contains(t) && pos != self.player.pos && self.mobs.at(pos).is_none(),
            None => false,
        }
    }

    /// Any cell within Chebyshev distance `radius` of `pos` holds `kind`.
    pub fn nearby(&self, pos: Pos, radius: i32, kind: TileKind) -> bool {
        (-radius..=radius).any(|dy| (-radius..=radius).any(|dx| self.grid.get(pos.offset(dx, dy)) == Some(kind)))
    }

    pub fn is_night(&self) -> bool {
        self.light_level < mechanics().daylight.night_threshold
    }

    /// Per-cell occupancy codes: 0 empty, 1 player, then mob kinds.
    pub fn mob_map(&self) -> Vec<u8> {
        let mut map = vec![0u8; self.grid.tiles().len()];
        let size = crate::world::MAP_SIZE;
        for (kind, m) in self.mobs.iter() {
            map[(m.pos.y * size + m.pos.x) as usize] = kind.map_code();
        }
        map[(self.player.pos.y * size + self.player.pos.x) as usize] = PLAYER_MAP_CODE;
        map
    }

    /// Canonical serialization, used for determinism checks.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("state serializes")
    }
}
