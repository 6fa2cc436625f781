use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::nav::{walkable, SEARCH_ORDER};
use super::rollout::Policy;
use super::skills::{veto_lava, Ctx};
use crate::mechanics::{mechanics, Achievement, Action, EnvState, Item, MobKind};
use crate::seed::{Seed, Stream, StreamRng};
use crate::world::{Pos, TileKind, MAP_SIZE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoodSource {
    Cow,
    Plant,
}

/// A unit of work on the goal stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgoal {
    Collect(Item),
    Craft(Item),
    Place(TileKind),
    Attack(MobKind),
    Drink,
    Eat(FoodSource),
    SleepUntilDawn,
    Explore,
    Wait(u32),
}

impl Subgoal {
    /// Whether the bindings name things that can actually be collected,
    /// crafted, placed or attacked.
    pub fn is_valid(self) -> bool {
        match self {
            Subgoal::Collect(i) => matches!(
                i,
                Item::Wood | Item::Stone | Item::Coal | Item::Iron | Item::Diamond | Item::Sapling
            ),
            Subgoal::Craft(i) => mechanics().make_rule(i).is_some(),
            Subgoal::Place(t) => mechanics().place_rule(t).is_some(),
            Subgoal::Attack(k) => k != MobKind::Arrow,
            _ => true,
        }
    }
}

/// Unlock order, cheapest first.
pub const PRIORITY: [Achievement; Achievement::COUNT] = [
    Achievement::CollectWood,
    Achievement::PlaceTable,
    Achievement::MakeWoodPickaxe,
    Achievement::MakeWoodSword,
    Achievement::CollectSapling,
    Achievement::PlacePlant,
    Achievement::CollectDrink,
    Achievement::CollectStone,
    Achievement::PlaceStone,
    Achievement::MakeStonePickaxe,
    Achievement::MakeStoneSword,
    Achievement::CollectCoal,
    Achievement::DefeatZombie,
    Achievement::EatCow,
    Achievement::PlaceFurnace,
    Achievement::CollectIron,
    Achievement::MakeIronPickaxe,
    Achievement::MakeIronSword,
    Achievement::CollectDiamond,
    Achievement::EatPlant,
    Achievement::DefeatSkeleton,
    Achievement::WakeUp,
];

const DRINK_AT: i32 = 4;
const EAT_AT: i32 = 4;
const SLEEP_AT: i32 = 3;
/// After dark the expert turns in earlier.
const NIGHT_SLEEP_AT: i32 = 6;
/// Steps to wait before retrying an achievement that had no reachable target.
const RETRY_AFTER: u32 = 25;
/// Walking distance worth a detour to drink or eat before stats run low.
const TOP_UP_RANGE: usize = 8;
/// Sleeping without shelter needs this much distance to the nearest zombie.
const OPEN_SLEEP_CLEARANCE: i32 = 6;
/// Plants kept growing as a food reserve.
const FARM_SIZE: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerState {
    pub goal_stack: Vec<Subgoal>,
    pub task_script: Option<Vec<Achievement>>,
    pub progress_cursor: usize,
    rng: StreamRng,
    waypoints: Vec<Pos>,
    waypoint: usize,
    retry_at: [u32; Achievement::COUNT],
}

impl PlannerState {
    /// Fresh planner for the episode seeded with `seed`.
    pub fn new(seed: u64) -> Self {
        PlannerState {
            goal_stack: Vec::new(),
            task_script: None,
            progress_cursor: 0,
            rng: Seed::new(seed, Stream::Episode).rng(),
            waypoints: Vec::new(),
            waypoint: 0,
            retry_at: [0; Achievement::COUNT],
        }
    }

    pub fn with_script(seed: u64, script: Vec<Achievement>) -> Self {
        PlannerState { task_script: Some(script), ..PlannerState::new(seed) }
    }

    /// Spiral of waypoints around `center`, rotated by a seeded angle.
    fn spiral(&mut self, center: Pos) {
        let phase = self.rng.uniform() * 2.0 * PI;
        let mut pts = Vec::new();
        for ring in 1..=5 {
            let r = 7.0 * ring as f64;
            for j in 0..8 {
                let a = phase + j as f64 * PI / 4.0 + ring as f64 * 0.3;
                let x = (center.x as f64 + r * a.cos()).round() as i32;
                let y = (center.y as f64 + r * a.sin()).round() as i32;
                pts.push(Pos::new(x.clamp(1, MAP_SIZE - 2), y.clamp(1, MAP_SIZE - 2)));
            }
        }
        self.waypoints = pts;
        self.waypoint = 0;
    }

    /// Heads for open grassland, where cows appear, and wanders inside it.
    fn forage(&mut self, ctx: &Ctx) -> Action {
        const MEADOW: usize = 18;
        if ctx.grass_around(ctx.pos()) < MEADOW {
            if let Some(a) = ctx.reach(|p| ctx.grass_around(p) >= MEADOW) {
                return a;
            }
            return self.explore(ctx);
        }
        let start = self.rng.below(4) as usize;
        (0..4)
            .map(|i| SEARCH_ORDER[(start + i) % 4])
            .find(|&d| walkable(ctx.s, ctx.pos().step(d)) && ctx.grass_around(ctx.pos().step(d)) >= MEADOW)
            .map_or(Action::Noop, Action::from_direction)
    }

    pub(crate) fn explore(&mut self, ctx: &Ctx) -> Action {
        if self.waypoints.is_empty() {
            self.spiral(ctx.s.grid.spawn_point);
        }
        for _ in 0..self.waypoints.len() {
            let goal = self.waypoints[self.waypoint % self.waypoints.len()];
            if ctx.pos().manhattan(goal) > 2 {
                if let Some(a) = ctx.head_to(goal) {
                    return a;
                }
            }
            self.waypoint = (self.waypoint + 1) % self.waypoints.len();
        }
        Action::from_direction(SEARCH_ORDER[self.rng.below(4) as usize])
    }
}

/// One decision of the scripted survival expert.
pub fn survival_policy(state: &EnvState, planner: PlannerState) -> (Action, PlannerState) {
    let mut planner = planner;
    let action = decide(state, &mut planner);
    (action, planner)
}

/// The scripted expert as a [`Policy`].
#[derive(Clone, Debug)]
pub struct Expert {
    pub planner: PlannerState,
}

impl Expert {
    pub fn new(seed: u64) -> Self {
        Expert { planner: PlannerState::new(seed) }
    }
}

impl Policy for Expert {
    fn act(&mut self, state: &EnvState) -> Action {
        decide(state, &mut self.planner)
    }
}

/// Reactions to nearby hostiles: fight adjacent ones, wall off approaching ones.
pub(crate) fn defend(ctx: &Ctx) -> Option<Action> {
    let s = ctx.s;
    let here = ctx.pos();
    for d in SEARCH_ORDER {
        if matches!(ctx.mob(here.step(d)), Some(MobKind::Zombie | MobKind::Skeleton)) {
            return Some(if s.player.facing == d { Action::Do } else { Action::from_direction(d) });
        }
    }
    if s.player.health <= 3 {
        if let Some(a) = ctx.flee(MobKind::Zombie) {
            if s.mobs.iter().any(|(k, m)| k == MobKind::Zombie && m.pos.chebyshev(here) <= 3) {
                return Some(a);
            }
        }
    }
    if ctx.has(Item::Stone) == 0 {
        return None;
    }
    let front = s.player.target();
    let open = ctx.mob(front).is_none()
        && ctx.tile(front).is_some_and(|t| matches!(t, TileKind::Grass | TileKind::Sand | TileKind::Path));
    if !open {
        return None;
    }
    let (dx, dy) = s.player.facing.delta();
    let arrow = (1..=mechanics().captions.block_arrow_range).any(|j| {
        let p = front.offset(dx * j, dy * j);
        matches!(s.mobs.at(p), Some((MobKind::Arrow, slot))
            if s.mobs.get(MobKind::Arrow, slot).is_some_and(|a| a.facing == s.player.facing.opposite()))
    });
    let zombie = s.is_night() && front.neighbors().any(|n| n != here && ctx.mob(n) == Some(MobKind::Zombie));
    (arrow || zombie).then_some(Action::PlaceStone)
}

fn pursue(ctx: &Ctx, ach: Achievement) -> Option<Action> {
    let p = &ctx.s.player;
    use Achievement as A;
    match ach {
        A::CollectWood => ctx.obtain(Item::Wood),
        A::CollectSapling => ctx.obtain(Item::Sapling),
        A::CollectStone => ctx.obtain(Item::Stone),
        A::CollectCoal => ctx.obtain(Item::Coal),
        A::CollectIron => ctx.obtain(Item::Iron),
        A::CollectDiamond => ctx.obtain(Item::Diamond),
        A::CollectDrink => ctx.drink(),
        A::PlaceTable => ctx.place(TileKind::Table),
        A::PlaceFurnace => ctx.place(TileKind::Furnace),
        A::PlacePlant => ctx.place(TileKind::Plant),
        A::PlaceStone => ctx.place_stone(),
        A::MakeWoodPickaxe => ctx.make(Item::WoodPickaxe),
        A::MakeStonePickaxe => ctx.make(Item::StonePickaxe),
        A::MakeIronPickaxe => ctx.make(Item::IronPickaxe),
        A::MakeWoodSword => ctx.make(Item::WoodSword),
        A::MakeStoneSword => ctx.make(Item::StoneSword),
        A::MakeIronSword => ctx.make(Item::IronSword),
        A::EatCow => ctx.attack(MobKind::Cow),
        A::EatPlant => ctx.eat_plant(),
        A::DefeatZombie => {
            let near = ctx.s.mobs.iter().any(|(k, m)| k == MobKind::Zombie && m.pos.chebyshev(ctx.pos()) <= 10);
            (near && p.health >= 5).then(|| ctx.attack(MobKind::Zombie)).flatten()
        }
        A::DefeatSkeleton => {
            let armed = ctx.has(Item::StoneSword) + ctx.has(Item::IronSword) > 0;
            (armed && p.health >= 7).then(|| ctx.attack(MobKind::Skeleton)).flatten()
        }
        A::WakeUp => None,
    }
}

fn subgoal_for(ach: Achievement) -> Subgoal {
    use Achievement as A;
    match ach {
        A::CollectWood => Subgoal::Collect(Item::Wood),
        A::CollectSapling => Subgoal::Collect(Item::Sapling),
        A::CollectStone => Subgoal::Collect(Item::Stone),
        A::CollectCoal => Subgoal::Collect(Item::Coal),
        A::CollectIron => Subgoal::Collect(Item::Iron),
        A::CollectDiamond => Subgoal::Collect(Item::Diamond),
        A::CollectDrink => Subgoal::Drink,
        A::PlaceTable => Subgoal::Place(TileKind::Table),
        A::PlaceFurnace => Subgoal::Place(TileKind::Furnace),
        A::PlacePlant => Subgoal::Place(TileKind::Plant),
        A::PlaceStone => Subgoal::Place(TileKind::Stone),
        A::MakeWoodPickaxe => Subgoal::Craft(Item::WoodPickaxe),
        A::MakeStonePickaxe => Subgoal::Craft(Item::StonePickaxe),
        A::MakeIronPickaxe => Subgoal::Craft(Item::IronPickaxe),
        A::MakeWoodSword => Subgoal::Craft(Item::WoodSword),
        A::MakeStoneSword => Subgoal::Craft(Item::StoneSword),
        A::MakeIronSword => Subgoal::Craft(Item::IronSword),
        A::EatCow => Subgoal::Eat(FoodSource::Cow),
        A::EatPlant => Subgoal::Eat(FoodSource::Plant),
        A::DefeatZombie => Subgoal::Attack(MobKind::Zombie),
        A::DefeatSkeleton => Subgoal::Attack(MobKind::Skeleton),
        A::WakeUp => Subgoal::SleepUntilDawn,
    }
}

fn interrupt_done(state: &EnvState, goal: Subgoal) -> bool {
    let p = &state.player;
    let max = mechanics().player.max_stat;
    match goal {
        Subgoal::Drink => p.drink >= max,
        Subgoal::Eat(_) => p.food >= max - 1,
        Subgoal::SleepUntilDawn => !p.sleeping && p.energy >= max,
        _ => true,
    }
}

fn serve_interrupt(ctx: &Ctx, goal: Subgoal) -> Option<Action> {
    match goal {
        Subgoal::Drink => ctx.drink(),
        Subgoal::Eat(_) => ctx.eat_plant().or_else(|| ctx.attack(MobKind::Cow)),
        Subgoal::SleepUntilDawn => ctx.shelter().or_else(|| {
            let here = ctx.pos();
            let threat = ctx.s.mobs.iter().any(|(k, m)| k == MobKind::Zombie && m.pos.chebyshev(here) <= OPEN_SLEEP_CLEARANCE);
            (!threat).then_some(Action::Sleep)
        }),
        _ => None,
    }
}

fn decide(state: &EnvState, planner: &mut PlannerState) -> Action {
    if state.player.sleeping {
        return Action::Noop;
    }
    let ctx = Ctx::new(state);
    let action = choose(&ctx, state, planner);
    veto_lava(state, action)
}

fn choose(ctx: &Ctx, state: &EnvState, planner: &mut PlannerState) -> Action {
    let p = &state.player;
    // Keep only unfinished survival interrupts.
    planner
        .goal_stack
        .retain(|&g| matches!(g, Subgoal::Drink | Subgoal::Eat(_) | Subgoal::SleepUntilDawn) && !interrupt_done(state, g));
    let mut push = |g: Subgoal| {
        if !planner.goal_stack.contains(&g) {
            planner.goal_stack.push(g);
        }
    };
    if p.drink <= DRINK_AT {
        push(Subgoal::Drink);
    }
    if p.food <= EAT_AT {
        push(Subgoal::Eat(FoodSource::Cow));
    }
    if p.energy <= SLEEP_AT || (state.is_night() && p.energy <= NIGHT_SLEEP_AT) {
        push(Subgoal::SleepUntilDawn);
    }

    if let Some(a) = defend(ctx) {
        return a;
    }
    for g in planner.goal_stack.clone().into_iter().rev() {
        if let Some(a) = serve_interrupt(ctx, g) {
            return a;
        }
    }
    if planner.goal_stack.contains(&Subgoal::Eat(FoodSource::Cow)) {
        return planner.forage(ctx);
    }
    if planner.goal_stack.contains(&Subgoal::Drink) {
        return planner.explore(ctx);
    }

    // Cheap top-ups while passing by.
    let max = mechanics().player.max_stat;
    if p.drink < max - 2 {
        if let Some(a) = ctx.interact_within(TOP_UP_RANGE, |c| ctx.tile(c) == Some(TileKind::Water)) {
            return a;
        }
    }
    if p.food < max - 2 {
        let food = |c: Pos| ctx.mob(c) == Some(MobKind::Cow) || ctx.ripe_plant(c);
        if let Some(a) = ctx.interact_within(2 * TOP_UP_RANGE, food) {
            return a;
        }
    }

    // Keep a few plants growing as a food reserve while grass is at hand.
    let grass_near = ctx.walk().nearest(TOP_UP_RANGE, |c| ctx.tile(c) == Some(TileKind::Grass)).is_some();
    if state.grid.plant_count() < FARM_SIZE && p.food > EAT_AT && grass_near {
        let farm = if ctx.has(Item::Sapling) > 0 { ctx.place(TileKind::Plant) } else { ctx.obtain(Item::Sapling) };
        if let Some(a) = farm {
            return a;
        }
    }

    let now = state.step_count;
    for ach in PRIORITY {
        if state.achievements.contains(ach) || planner.retry_at[ach.index()] > now {
            continue;
        }
        match pursue(ctx, ach) {
            Some(a) => {
                planner.goal_stack.push(subgoal_for(ach));
                return a;
            }
            None => planner.retry_at[ach.index()] = now + RETRY_AFTER,
        }
    }

    // Everything reachable is done: top up stats and wander.
    if p.drink < max - 2 {
        if let Some(a) = ctx.drink() {
            return a;
        }
    }
    if p.food < max - 2 {
        if let Some(a) = ctx.eat_plant().or_else(|| ctx.attack(MobKind::Cow)) {
            return a;
        }
    }
    planner.goal_stack.push(Subgoal::Explore);
    planner.explore(ctx)
}
