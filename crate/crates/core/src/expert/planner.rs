//! Instruction chaining: a planner that emits captions and a controller that follows them.

use super::policy::{defend, PlannerState};
use super::skills::{veto_lava, Ctx};
use crate::caption::{is_caption, parse_caption, Rule};
use crate::error::{Error, Result};
use crate::eval::TaskSpec;
use crate::mechanics::{mechanics, Achievement, Action, EnvState, Item, MobKind};
use crate::world::{Direction, TileKind};

/// Caption issued once every sub-task is done.
pub const TERMINAL_INSTRUCTION: &str = "stay";

/// Instruction for the first incomplete sub-task, inferring progress from the unlocked set.
///
/// Progress is the longest prefix of sub-tasks already unlocked. Use
/// [`instruction_for`] when the caller tracks ordered progress itself.
pub fn heuristic_instruction_planner(state: &EnvState, task: &TaskSpec) -> Result<String> {
    let cursor = task.subtasks.iter().take_while(|&&a| state.achievements.contains(a)).count();
    instruction_for(state, task, cursor)
}

/// Instruction for sub-task `cursor` of `task`.
pub fn instruction_for(state: &EnvState, task: &TaskSpec, cursor: usize) -> Result<String> {
    if task.subtasks.is_empty() {
        return Err(Error::UnknownTask(format!("{} has no sub-tasks", task.id)));
    }
    Ok(match task.subtasks.get(cursor) {
        Some(&ach) => prerequisite(state, ach),
        None => TERMINAL_INSTRUCTION.to_string(),
    })
}

fn caption_name(item: Item) -> String {
    item.name().replace('_', " ")
}

fn collect_source(ach: Achievement) -> Option<(TileKind, &'static str)> {
    use Achievement as A;
    Some(match ach {
        A::CollectWood => (TileKind::Tree, "wood"),
        A::CollectSapling => (TileKind::Grass, "sapling"),
        A::CollectDrink => (TileKind::Water, "drink"),
        A::CollectStone => (TileKind::Stone, "stone"),
        A::CollectCoal => (TileKind::CoalOre, "coal"),
        A::CollectIron => (TileKind::IronOre, "iron"),
        A::CollectDiamond => (TileKind::DiamondOre, "diamond"),
        _ => return None,
    })
}

/// The achievement that yields one `item`.
fn source_of(item: Item) -> Achievement {
    use Achievement as A;
    match item {
        Item::Wood => A::CollectWood,
        Item::Stone => A::CollectStone,
        Item::Coal => A::CollectCoal,
        Item::Iron => A::CollectIron,
        Item::Diamond => A::CollectDiamond,
        Item::Sapling => A::CollectSapling,
        Item::WoodPickaxe => A::MakeWoodPickaxe,
        Item::StonePickaxe => A::MakeStonePickaxe,
        Item::IronPickaxe => A::MakeIronPickaxe,
        Item::WoodSword => A::MakeWoodSword,
        Item::StoneSword => A::MakeStoneSword,
        Item::IronSword => A::MakeIronSword,
    }
}

fn missing_items(state: &EnvState, uses: &[(Item, u8)]) -> Option<String> {
    uses.iter()
        .find(|&&(item, n)| state.player.has(item) < n)
        .map(|&(item, _)| prerequisite(state, source_of(item)))
}

fn missing_station(state: &EnvState, nearby: &[TileKind]) -> Option<String> {
    let r = mechanics().player.nearby_radius;
    nearby.iter().find(|&&k| !state.nearby(state.player.pos, r, k)).map(|&k| {
        let ach = if k == TileKind::Furnace { Achievement::PlaceFurnace } else { Achievement::PlaceTable };
        prerequisite(state, ach)
    })
}

/// Names a placement target: the faced tile when legal, else grass, else any legal target.
fn place_caption(state: &EnvState, material: TileKind) -> String {
    let rule = mechanics().place_rule(material).expect("placeable material");
    let caption = |t: TileKind| format!("place {} on {}", material.name(), t.name());
    let front = state.grid.get(state.player.target());
    front
        .filter(|t| rule.targets.contains(t))
        .into_iter()
        .chain([TileKind::Grass])
        .chain(rule.targets.iter().copied())
        .map(caption)
        .find(|c| is_caption(c))
        .expect("every placeable material has a caption")
}

/// Caption for the next step toward `ach`.
fn prerequisite(state: &EnvState, ach: Achievement) -> String {
    use Achievement as A;
    if let Some((material, name)) = collect_source(ach) {
        if let Some(rule) = mechanics().collect_rule(material) {
            if let Some(&tool) = rule.require.iter().find(|&&t| state.player.has(t) == 0) {
                return prerequisite(state, source_of(tool));
            }
        }
        return format!("obtain {name}");
    }
    let placed = match ach {
        A::PlaceTable => Some(TileKind::Table),
        A::PlaceFurnace => Some(TileKind::Furnace),
        A::PlacePlant => Some(TileKind::Plant),
        A::PlaceStone => Some(TileKind::Stone),
        _ => None,
    };
    if let Some(material) = placed {
        let rule = mechanics().place_rule(material).expect("placeable material");
        return missing_items(state, &rule.uses)
            .or_else(|| missing_station(state, &rule.nearby))
            .unwrap_or_else(|| place_caption(state, material));
    }
    let tool = match ach {
        A::MakeWoodPickaxe => Some(Item::WoodPickaxe),
        A::MakeStonePickaxe => Some(Item::StonePickaxe),
        A::MakeIronPickaxe => Some(Item::IronPickaxe),
        A::MakeWoodSword => Some(Item::WoodSword),
        A::MakeStoneSword => Some(Item::StoneSword),
        A::MakeIronSword => Some(Item::IronSword),
        _ => None,
    };
    if let Some(tool) = tool {
        let rule = mechanics().make_rule(tool).expect("craftable tool");
        return missing_items(state, &rule.uses)
            .or_else(|| missing_station(state, &rule.nearby))
            .unwrap_or_else(|| format!("craft {}", caption_name(tool)));
    }
    match ach {
        A::EatCow => "kill cow".into(),
        A::DefeatZombie => "kill zombie".into(),
        A::DefeatSkeleton => "kill skeleton".into(),
        A::WakeUp => "go to sleep".into(),
        A::EatPlant if state.grid.plant_count() == 0 => prerequisite(state, A::PlacePlant),
        A::EatPlant => "obtain plant".into(),
        _ => unreachable!("every achievement is covered above"),
    }
}

fn tile_named(name: &str) -> Option<TileKind> {
    TileKind::from_name(name)
}

fn mob_named(name: &str) -> Option<MobKind> {
    MobKind::from_name(name)
}

/// One controller step toward satisfying `caption`. `None` means no target is in reach.
pub fn follow_caption(state: &EnvState, caption: &str) -> Result<Option<Action>> {
    let ctx = Ctx::new(state);
    follow(&ctx, caption)
}

fn follow(ctx: &Ctx, caption: &str) -> Result<Option<Action>> {
    let (rule, b) = parse_caption(caption).ok_or_else(|| Error::UnknownCaption(caption.to_string()))?;
    let item = b.item.as_deref().unwrap_or_default();
    let s = ctx.s;
    Ok(match rule {
        Rule::Harvest => match item {
            "drink" => ctx.drink(),
            "plant" => ctx.tend_plant(),
            other => Item::from_name(other).and_then(|i| ctx.obtain(i)),
        },
        Rule::Place => tile_named(item).and_then(|m| ctx.place(m)),
        Rule::Craft => Item::from_name(&item.replace(' ', "_")).and_then(|t| ctx.make(t)),
        Rule::Kill => b.mob.as_deref().and_then(mob_named).and_then(|k| ctx.attack(k)),
        Rule::Sleep => Some(Action::Sleep),
        Rule::Stay | Rule::AttackedBy => Some(Action::Noop),
        Rule::Move => {
            let d = match b.dir.as_deref() {
                Some("north") => Direction::Up,
                Some("south") => Direction::Down,
                Some("east") => Direction::Right,
                _ => Direction::Left,
            };
            Some(Action::from_direction(d))
        }
        Rule::Approach => match b.mob.as_deref() {
            Some("plant") => ctx.interact(|p| ctx.tile(p) == Some(TileKind::Plant)).map(no_use),
            other => other.and_then(mob_named).and_then(|k| ctx.attack(k)).map(no_use),
        },
        Rule::Flee => b.mob.as_deref().and_then(mob_named).and_then(|k| ctx.flee(k)),
        Rule::Explore => None,
        Rule::Shelter => ctx.shelter().filter(|&a| a != Action::Sleep),
        Rule::Path => {
            let over = b.material.as_deref().and_then(tile_named).unwrap_or(TileKind::Water);
            let target = s.player.target();
            if ctx.tile(target) == Some(TileKind::Stone) && ctx.has(Item::WoodPickaxe) > 0 {
                Some(Action::Do)
            } else if ctx.has(Item::Stone) == 0 {
                ctx.obtain(Item::Stone)
            } else {
                ctx.face_and(|c| ctx.tile(c) == Some(over), |_| true, Action::PlaceStone, usize::MAX)
            }
        }
        Rule::Tunnel => {
            let target = s.player.target();
            match ctx.tile(target) {
                Some(t) if t.is_rock() && ctx.has(Item::WoodPickaxe) > 0 => Some(Action::Do),
                _ => Some(Action::from_direction(s.player.facing)),
            }
        }
        Rule::BlockAttack => {
            let action = Action::place_action(item);
            action.filter(|&a| crate::mechanics::legal_effective_action(s, a) == a)
        }
    })
}

/// Adjacent-cell approach shouldn't hit the target.
fn no_use(a: Action) -> Action {
    if a == Action::Do {
        Action::Noop
    } else {
        a
    }
}

/// Planner plus controller: follows one instruction at a time through a task.
#[derive(Clone, Debug)]
pub struct ChainedAgent {
    task: TaskSpec,
    explorer: PlannerState,
    last: String,
}

impl ChainedAgent {
    pub fn new(task: TaskSpec, seed: u64) -> Result<Self> {
        task.validate()?;
        Ok(ChainedAgent { task, explorer: PlannerState::new(seed), last: String::new() })
    }

    /// The instruction issued on the latest step.
    pub fn instruction(&self) -> &str {
        &self.last
    }

    /// Picks an action given the task's ordered progress.
    pub fn act(&mut self, state: &EnvState, cursor: usize) -> Result<Action> {
        if state.player.sleeping {
            return Ok(Action::Noop);
        }
        let ctx = Ctx::new(state);
        let p = &state.player;
        let instruction = if state.config.survival_decay_enabled && p.drink <= 3 {
            "obtain drink".to_string()
        } else if state.config.survival_decay_enabled && p.food <= 3 {
            "kill cow".to_string()
        } else {
            instruction_for(state, &self.task, cursor)?
        };
        let action = match defend(&ctx) {
            Some(a) => a,
            None => match follow(&ctx, &instruction)? {
                Some(a) => a,
                None => self.explorer.explore(&ctx),
            },
        };
        self.last = instruction;
        Ok(veto_lava(state, action))
    }
}
