//! Low-level controllers shared by the survival expert and the caption follower.

use std::cell::OnceCell;

use super::nav::{diggable, walkable, Field, SEARCH_ORDER};
use crate::caption::pocket_size_with;
use crate::mechanics::{legal_effective_action, mechanics, Action, EnvState, Item, MobKind, GROUND};
use crate::world::{Direction, Pos, TileKind};

/// Walk distance beyond which a new table is cheaper than going back.
const STATION_RANGE: usize = 24;
/// Search radius for shelter spots.
const SHELTER_RANGE: usize = 60;
/// Walkable regions smaller than this count as enclosed.
const ENCLOSED: usize = 40;

fn dir_between(from: Pos, to: Pos) -> Direction {
    Direction::from_delta(to.x - from.x, to.y - from.y).expect("cells are adjacent")
}

/// One decision's worth of cached searches over a state.
pub struct Ctx<'a> {
    pub s: &'a EnvState,
    walk: Field,
    dig: OnceCell<Field>,
}

impl<'a> Ctx<'a> {
    pub fn new(s: &'a EnvState) -> Self {
        Ctx {
            s,
            walk: Field::build(s.player.pos, |p| walkable(s, p)),
            dig: OnceCell::new(),
        }
    }

    pub fn walk(&self) -> &Field {
        &self.walk
    }

    fn dig(&self) -> &Field {
        self.dig
            .get_or_init(|| Field::build(self.s.player.pos, |p| walkable(self.s, p) || diggable(self.s, p)))
    }

    pub fn pos(&self) -> Pos {
        self.s.player.pos
    }

    pub fn tile(&self, p: Pos) -> Option<TileKind> {
        self.s.grid.get(p)
    }

    pub fn has(&self, item: Item) -> u8 {
        self.s.player.has(item)
    }

    pub fn mob(&self, p: Pos) -> Option<MobKind> {
        self.s.mobs.at(p).map(|(k, _)| k)
    }

    fn legal(&self, a: Action) -> Option<Action> {
        (legal_effective_action(self.s, a) == a).then_some(a)
    }

    /// The action that makes progress into the adjacent cell `next`.
    fn advance(&self, next: Pos) -> Action {
        let d = dir_between(self.pos(), next);
        let mv = Action::from_direction(d);
        if walkable(self.s, next) || self.s.player.facing != d {
            return mv;
        }
        match self.tile(next) {
            Some(TileKind::Water) => self.legal(Action::PlaceStone).unwrap_or(Action::Noop),
            Some(t) if t.is_rock() => Action::Do,
            _ => mv,
        }
    }

    fn toward(&self, field: &Field, goal: Pos) -> Option<Action> {
        field.first_step(goal).map(|n| self.advance(n))
    }

    /// Walks to a cell next to something matching `pred` and uses it.
    pub fn interact(&self, pred: impl Fn(Pos) -> bool) -> Option<Action> {
        let target = self.s.player.target();
        if pred(target) {
            return Some(Action::Do);
        }
        let here = self.pos();
        if let Some(d) = SEARCH_ORDER.into_iter().find(|&d| pred(here.step(d))) {
            return Some(Action::from_direction(d));
        }
        let stand = |p: Pos| p.neighbors().any(&pred);
        if let Some(s) = self.walk.nearest(usize::MAX, stand) {
            return self.toward(&self.walk, s);
        }
        let dig = self.dig();
        dig.nearest(usize::MAX, stand).and_then(|s| self.toward(dig, s))
    }

    /// [`Ctx::interact`] restricted to targets within `max_dist` walking steps.
    pub fn interact_within(&self, max_dist: usize, pred: impl Fn(Pos) -> bool) -> Option<Action> {
        let target = self.s.player.target();
        if pred(target) {
            return Some(Action::Do);
        }
        let here = self.pos();
        if let Some(d) = SEARCH_ORDER.into_iter().find(|&d| pred(here.step(d))) {
            return Some(Action::from_direction(d));
        }
        let s = self.walk.nearest(max_dist, |p| p.neighbors().any(&pred))?;
        self.toward(&self.walk, s)
    }

    /// Number of grass cells in the 5×5 square around `p`.
    pub fn grass_around(&self, p: Pos) -> usize {
        (-2..=2)
            .flat_map(|dx| (-2..=2).map(move |dy| (dx, dy)))
            .filter(|&(dx, dy)| self.tile(p.offset(dx, dy)) == Some(TileKind::Grass))
            .count()
    }

    /// Walks to the nearest cell accepted by `pred` (possibly through rock).
    pub fn reach(&self, pred: impl Fn(Pos) -> bool) -> Option<Action> {
        if pred(self.pos()) {
            return None;
        }
        if let Some(s) = self.walk.nearest(usize::MAX, &pred) {
            return self.toward(&self.walk, s);
        }
        let dig = self.dig();
        dig.nearest(usize::MAX, &pred).and_then(|s| self.toward(dig, s))
    }

    /// Stands next to a cell accepted by `valid`, faces it, then performs `action`.
    /// `stand_ok` filters the cell the player acts from.
    pub fn face_and(&self, valid: impl Fn(Pos) -> bool, stand_ok: impl Fn(Pos) -> bool, action: Action, max_dist: usize) -> Option<Action> {
        let here = self.pos();
        if stand_ok(here) && valid(self.s.player.target()) {
            return Some(action);
        }
        for &p in self.walk.order() {
            if self.walk.distance(p).is_some_and(|d| d > max_dist) {
                break;
            }
            for d in SEARCH_ORDER {
                let s = p.step(d);
                if walkable(self.s, s) && stand_ok(s) && valid(s.step(d)) {
                    return Some(if p == here { Action::from_direction(d) } else { self.toward(&self.walk, p)? });
                }
            }
        }
        None
    }

    fn can_place_on(&self, material: TileKind, c: Pos) -> bool {
        let Some(rule) = mechanics().place_rule(material) else { return false };
        c != self.pos()
            && self.mob(c).is_none()
            && self.tile(c).is_some_and(|t| rule.targets.contains(&t))
            && (material != TileKind::Plant || self.s.grid.plant_count() < self.s.grid.plants.len())
    }

    fn near_all(&self, p: Pos, kinds: &[TileKind]) -> bool {
        let r = mechanics().player.nearby_radius;
        kinds.iter().all(|&k| self.s.nearby(p, r, k))
    }

    /// Gets one more of `item`.
    pub fn obtain(&self, item: Item) -> Option<Action> {
        let ore = |kind: TileKind, tool: Option<Item>| match tool {
            Some(t) if self.has(t) == 0 => self.make(t),
            _ => self.interact(|p| self.tile(p) == Some(kind) && self.mob(p).is_none()),
        };
        match item {
            Item::Wood => ore(TileKind::Tree, None),
            Item::Stone => ore(TileKind::Stone, Some(Item::WoodPickaxe)),
            Item::Coal => ore(TileKind::CoalOre, Some(Item::WoodPickaxe)),
            Item::Iron => ore(TileKind::IronOre, Some(Item::StonePickaxe)),
            Item::Diamond => ore(TileKind::DiamondOre, Some(Item::IronPickaxe)),
            Item::Sapling => self.face_and(
                |c| self.tile(c) == Some(TileKind::Grass) && self.mob(c).is_none(),
                |_| true,
                Action::Do,
                usize::MAX,
            ),
            tool => self.make(tool),
        }
    }

    pub fn drink(&self) -> Option<Action> {
        self.interact(|p| self.tile(p) == Some(TileKind::Water))
    }

    pub fn attack(&self, kind: MobKind) -> Option<Action> {
        self.interact(|p| self.mob(p) == Some(kind))
    }

    pub fn ripe_plant(&self, p: Pos) -> bool {
        self.tile(p) == Some(TileKind::Plant) && self.s.plant_ripe_in(p) == Some(0)
    }

    pub fn eat_plant(&self) -> Option<Action> {
        self.interact(|p| self.ripe_plant(p))
    }

    /// Waits next to the nearest plant until it ripens, then eats it.
    pub fn tend_plant(&self) -> Option<Action> {
        if let Some(a) = self.eat_plant() {
            return Some(a);
        }
        let plant = |p: Pos| self.tile(p) == Some(TileKind::Plant);
        if plant(self.s.player.target()) {
            return Some(Action::Noop);
        }
        self.interact(plant)
    }

    /// Crafts `tool`, gathering materials and stations first.
    pub fn make(&self, tool: Item) -> Option<Action> {
        let rule = mechanics().make_rule(tool)?;
        for &(item, n) in &rule.uses {
            if self.has(item) < n {
                return self.obtain(item);
            }
        }
        self.go_near(&rule.nearby, Action::craft_action(tool)?)
    }

    /// Moves within reach of every station in `kinds`, then performs `then`.
    fn go_near(&self, kinds: &[TileKind], then: Action) -> Option<Action> {
        if self.near_all(self.pos(), kinds) {
            return Some(then);
        }
        if let Some(s) = self.walk.nearest(STATION_RANGE, |p| self.near_all(p, kinds)) {
            return self.toward(&self.walk, s);
        }
        let missing = kinds
            .iter()
            .copied()
            .find(|&k| self.walk.nearest(STATION_RANGE, |p| self.near_all(p, &[k])).is_none())
            .unwrap_or(kinds[0]);
        self.place(missing)
    }

    /// Places `material`, gathering its costs and stations first.
    pub fn place(&self, material: TileKind) -> Option<Action> {
        let rule = mechanics().place_rule(material)?;
        for &(item, n) in &rule.uses {
            if self.has(item) < n {
                return self.obtain(item);
            }
        }
        let action = Action::place_action(material.name())?;
        let placed = self.face_and(
            |c| self.can_place_on(material, c),
            |s| self.near_all(s, &rule.nearby),
            action,
            STATION_RANGE,
        );
        if placed.is_some() || rule.nearby.is_empty() {
            return placed;
        }
        self.go_near(&rule.nearby, Action::Noop)
    }

    /// Places a stone, preferring water so the stone can later be mined into a path.
    pub fn place_stone(&self) -> Option<Action> {
        if self.has(Item::Stone) == 0 {
            return self.obtain(Item::Stone);
        }
        let on_water = |c: Pos| self.tile(c) == Some(TileKind::Water) && self.mob(c).is_none();
        self.face_and(on_water, |_| true, Action::PlaceStone, 12)
            .or_else(|| self.place(TileKind::Stone))
    }

    /// Gets into a small enclosed pocket and sleeps.
    pub fn shelter(&self) -> Option<Action> {
        let cap = mechanics().captions.shelter_pocket;
        if pocket_size_with(self.s, self.pos(), &[], cap) <= cap {
            return Some(Action::Sleep);
        }
        if self.has(Item::Stone) == 0 {
            return if self.has(Item::WoodPickaxe) > 0 { self.obtain(Item::Stone) } else { None };
        }
        if let Some(a) = self.seal(cap) {
            return Some(a);
        }
        if self.has(Item::WoodPickaxe) > 0 {
            return self.burrow();
        }
        None
    }

    /// Enters a cell whose remaining exit can be closed by a stone placed ahead.
    fn seal(&self, cap: usize) -> Option<Action> {
        let here = self.pos();
        let placeable = |c: Pos| self.mob(c).is_none() && self.tile(c).is_some_and(|t| GROUND.contains(t));
        for &p in self.walk.order() {
            if self.walk.distance(p).is_some_and(|d| d > SHELTER_RANGE) {
                break;
            }
            for d in SEARCH_ORDER {
                let s = p.step(d);
                let exit = s.step(d);
                if !walkable(self.s, s) || !placeable(exit) {
                    continue;
                }
                if pocket_size_with(self.s, s, &[exit], cap) > cap {
                    continue;
                }
                if here == s && self.s.player.facing == d {
                    return Some(Action::PlaceStone);
                }
                return Some(if p == here { Action::from_direction(d) } else { self.toward(&self.walk, p)? });
            }
        }
        None
    }

    /// Digs two cells straight into stone so the entrance can be sealed behind.
    fn burrow(&self) -> Option<Action> {
        let stone = |p: Pos| self.tile(p) == Some(TileKind::Stone) && self.mob(p).is_none();
        let closed = |p: Pos| self.tile(p).is_some_and(|t| !GROUND.contains(t) && t != TileKind::Lava);
        let dig = self.dig();
        for &o in self.walk.order() {
            if self.walk.distance(o).is_some_and(|d| d > SHELTER_RANGE) {
                break;
            }
            for d in SEARCH_ORDER {
                let (r1, r2) = (o.step(d), o.step(d).step(d));
                if !(stone(r1) && stone(r2) && closed(r2.step(d))) {
                    continue;
                }
                let sides = [r1, r2].into_iter().all(|r| {
                    SEARCH_ORDER
                        .into_iter()
                        .filter(|&e| e != d && e != d.opposite())
                        .all(|e| closed(r.step(e)))
                });
                if !sides {
                    continue;
                }
                if dig.distance(r2).is_some() {
                    return self.toward(dig, r2);
                }
            }
        }
        None
    }

    /// Heads toward `goal`, or to the closest reachable cell. Digs out of small pockets.
    pub fn head_to(&self, goal: Pos) -> Option<Action> {
        let best = |f: &Field| f.order().iter().copied().min_by_key(|p| (p.manhattan(goal), f.distance(*p)));
        let walk_best = best(&self.walk)?;
        if walk_best != self.pos() && self.walk.order().len() >= ENCLOSED {
            return self.toward(&self.walk, walk_best);
        }
        let dig = self.dig();
        let dig_best = best(dig).filter(|&p| p != self.pos())?;
        self.toward(dig, dig_best)
    }

    /// Steps to the free neighbor farthest from every mob of `kind`.
    pub fn flee(&self, kind: MobKind) -> Option<Action> {
        let threats: Vec<Pos> = self.s.mobs.iter().filter(|(k, _)| *k == kind).map(|(_, m)| m.pos).collect();
        let score = |p: Pos| threats.iter().map(|t| t.chebyshev(p)).min().unwrap_or(i32::MAX);
        let here = score(self.pos());
        SEARCH_ORDER
            .into_iter()
            .map(|d| (d, self.pos().step(d)))
            .filter(|&(_, p)| walkable(self.s, p))
            .filter(|&(_, p)| score(p) > here)
            .max_by_key(|&(d, p)| (score(p), std::cmp::Reverse(d as u8)))
            .map(|(d, _)| Action::from_direction(d))
    }
}

/// Replaces moves that would walk into lava.
pub fn veto_lava(state: &EnvState, action: Action) -> Action {
    match action.direction() {
        Some(d)
            if state.config.hazards_enabled
                && state.grid.get(state.player.pos.step(d)) == Some(TileKind::Lava) =>
        {
            Action::Noop
        }
        _ => action,
    }
}
