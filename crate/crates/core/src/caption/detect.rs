use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::vocab::{render_caption, Bindings, Category, Rule};
use crate::expert::Trajectory;
use crate::mechanics::{legal_effective_action, mechanics, Action, CaptionRules, DamageCause, EnvState, MobKind, GROUND};
use crate::world::{Direction, Pos, TileKind};

/// One matched rule occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionRecord {
    pub episode_id: u64,
    pub t: u32,
    pub rule_id: u8,
    pub category: Category,
    pub caption: String,
    pub frame_start: u32,
    pub frame_end: u32,
}

impl CaptionRecord {
    pub fn rule(&self) -> Rule {
        Rule::from_id(self.rule_id).expect("valid rule id")
    }
}

const APPROACH_KINDS: [Target; 4] = [Target::Mob(MobKind::Cow), Target::Mob(MobKind::Zombie), Target::Mob(MobKind::Skeleton), Target::Plant];
const FLEE_KINDS: [Target; 4] = [
    Target::Mob(MobKind::Cow),
    Target::Mob(MobKind::Zombie),
    Target::Mob(MobKind::Skeleton),
    Target::Mob(MobKind::Arrow),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Target {
    Mob(MobKind),
    Plant,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Mob(k) => k.name(),
            Target::Plant => "plant",
        }
    }
}

/// Chebyshev distance from the player to the nearest target of a kind.
fn nearest(state: &EnvState, target: Target) -> Option<i32> {
    let p = state.player.pos;
    match target {
        Target::Mob(kind) => state.mobs.iter().filter(|(k, _)| *k == kind).map(|(_, m)| m.pos.chebyshev(p)).min(),
        Target::Plant => state.grid.plants.iter().flatten().map(|pl| pl.pos.chebyshev(p)).min(),
    }
}

/// Size of the ground region connected to `start`, treating `blocked` cells as
/// walls. Counting stops past `cap`.
pub fn pocket_size_with(state: &EnvState, start: Pos, blocked: &[Pos], cap: usize) -> usize {
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for n in cur.neighbors() {
            if seen.len() > cap {
                return seen.len();
            }
            if seen.contains(&n) || blocked.contains(&n) {
                continue;
            }
            if state.grid.get(n).is_some_and(|k| GROUND.contains(k)) {
                seen.push(n);
                queue.push_back(n);
            }
        }
    }
    seen.len()
}

pub(crate) fn pocket_size(state: &EnvState, cap: usize) -> usize {
    pocket_size_with(state, state.player.pos, &[], cap)
}

#[derive(Clone, Copy, Debug)]
struct Removal {
    t: u32,
    pos: Pos,
}

/// Streaming rule matcher. Feed consecutive transitions with [`observe`].
///
/// [`observe`]: EventDetector::observe
#[derive(Clone, Debug)]
pub struct EventDetector {
    rules: CaptionRules,
    positions: VecDeque<Pos>,
    distances: VecDeque<HashMap<Target, i32>>,
    fresh: VecDeque<bool>,
    visited: Vec<u64>,
    noop_run: u32,
    last_emit: HashMap<String, u32>,
    bridged: HashMap<Pos, TileKind>,
    last_removal: Option<Removal>,
    started: bool,
}

impl Default for EventDetector {
    fn default() -> Self {
        Self::new()
    }
}

fn distances(state: &EnvState) -> HashMap<Target, i32> {
    APPROACH_KINDS
        .iter()
        .chain(&FLEE_KINDS)
        .filter_map(|&k| nearest(state, k).map(|d| (k, d)))
        .collect()
}

impl EventDetector {
    pub fn new() -> Self {
        EventDetector {
            rules: mechanics().captions.clone(),
            positions: VecDeque::new(),
            distances: VecDeque::new(),
            fresh: VecDeque::new(),
            visited: vec![0; 64],
            noop_run: 0,
            last_emit: HashMap::new(),
            bridged: HashMap::new(),
            last_removal: None,
            started: false,
        }
    }

    fn visit(&mut self, p: Pos) -> bool {
        let (row, bit) = (p.y as usize, 1u64 << p.x);
        let new = self.visited[row] & bit == 0;
        self.visited[row] |= bit;
        new
    }

    fn cooled(&self, caption: &str, t: u32) -> bool {
        self.last_emit
            .get(caption)
            .is_none_or(|&last| (t - last) as usize >= self.rules.window)
    }

    /// Matches all rules on the transition `prev --action--> next` at time `t`.
    /// Returns `(rule, caption)` pairs ordered by rule id, then caption.
    pub fn observe(&mut self, t: u32, action: Action, prev: &EnvState, next: &EnvState) -> Vec<(Rule, String)> {
        if !self.started {
            self.started = true;
            self.visit(prev.player.pos);
            self.positions.push_back(prev.player.pos);
            self.distances.push_back(distances(prev));
        }
        let win = self.rules.window;
        self.positions.push_back(next.player.pos);
        self.distances.push_back(distances(next));
        let is_new = self.visit(next.player.pos);
        self.fresh.push_back(is_new);
        while self.positions.len() > win + 1 {
            self.positions.pop_front();
            self.distances.pop_front();
        }
        while self.fresh.len() > win {
            self.fresh.pop_front();
        }

        let eff = legal_effective_action(prev, action);
        let mut out: Vec<(Rule, String)> = Vec::new();
        let mut emit = |rule: Rule, b: Bindings| {
            out.push((rule, render_caption(rule, &b).expect("checker bindings are complete")));
        };

        self.instant_rules(t, eff, prev, next, &mut emit);

        // Stay.
        if action == Action::Noop && !prev.player.sleeping && !next.player.sleeping {
            self.noop_run += 1;
        } else {
            self.noop_run = 0;
        }
        let mut windowed: Vec<(Rule, String)> = Vec::new();
        if self.noop_run as usize >= self.rules.stay_run {
            windowed.push((Rule::Stay, "stay".into()));
        }

        let full = self.positions.len() == win + 1;
        if full {
            let (first, last) = (self.positions[0], self.positions[win]);
            let (dx, dy) = (last.x - first.x, last.y - first.y);
            let need = self.rules.move_displacement;
            let dir = if dx.abs() >= need && dx.abs() > dy.abs() {
                Some(if dx > 0 { "east" } else { "west" })
            } else if dy.abs() >= need && dy.abs() > dx.abs() {
                Some(if dy > 0 { "south" } else { "north" })
            } else {
                None
            };
            if let Some(d) = dir {
                windowed.push((Rule::Move, format!("move to {d}")));
            }

            let moved = first != last;
            let r = self.rules.approach_radius;
            let series = |k: Target| -> Option<Vec<i32>> { self.distances.iter().map(|m| m.get(&k).copied()).collect() };
            if moved {
                for k in APPROACH_KINDS {
                    if let Some(s) = series(k) {
                        if s.windows(2).all(|w| w[1] <= w[0]) && s[0] > r && s[win] <= r {
                            windowed.push((Rule::Approach, format!("approach {}", k.name())));
                        }
                    }
                }
                for k in FLEE_KINDS {
                    if let Some(s) = series(k) {
                        if s.windows(2).all(|w| w[1] >= w[0]) && s[0] <= r && s[win] > r {
                            windowed.push((Rule::Flee, format!("flee from {}", k.name())));
                        }
                    }
                }
            }
        }

        let fresh = self.fresh.iter().filter(|&&f| f).count();
        let nothing_else = out.is_empty() && windowed.is_empty();
        if nothing_else && fresh >= self.rules.explore_new_tiles {
            windowed.push((Rule::Explore, "go explore".into()));
        }

        for (rule, caption) in windowed {
            if self.cooled(&caption, t) {
                self.last_emit.insert(caption.clone(), t);
                out.push((rule, caption));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn instant_rules(
        &mut self,
        t: u32,
        eff: Action,
        prev: &EnvState,
        next: &EnvState,
        emit: &mut impl FnMut(Rule, Bindings),
    ) {
        let target = prev.player.target();
        let before = prev.grid.get(target);
        let after = next.grid.get(target);

        if eff == Action::Do {
            match prev.mobs.at(target) {
                Some((kind, slot)) => {
                    let id = prev.mobs.get(kind, slot).expect("occupied").id;
                    if kind != MobKind::Arrow && next.mobs.find_id(id).is_none() {
                        emit(Rule::Kill, Bindings::new().mob(kind.name()));
                    }
                }
                None => match before {
                    Some(TileKind::Plant) => emit(Rule::Harvest, Bindings::new().item("plant")),
                    Some(TileKind::Water) => emit(Rule::Harvest, Bindings::new().item("drink")),
                    _ => {
                        for item in crate::mechanics::Item::ALL {
                            if next.player.has(item) > prev.player.has(item) {
                                emit(Rule::Harvest, Bindings::new().item(item.name()));
                            }
                        }
                    }
                },
            }
            if prev.mobs.at(target).is_none() && after == Some(TileKind::Path) {
                if let Some(material) = self.bridged.remove(&target) {
                    emit(Rule::Path, Bindings::new().material(material.name()));
                }
                if before.is_some_and(TileKind::is_rock) {
                    let axis = prev.player.facing;
                    let tunnel = self.last_removal.is_some_and(|r| {
                        ((t - r.t) as usize) <= self.rules.tunnel_gap
                            && r.pos.manhattan(target) == 1
                            && Direction::from_delta(target.x - r.pos.x, target.y - r.pos.y)
                                .is_some_and(|d| d == axis || d == axis.opposite())
                    });
                    if tunnel {
                        emit(Rule::Tunnel, Bindings::new());
                    }
                    self.last_removal = Some(Removal { t, pos: target });
                }
            }
        }

        if let Some(placed) = eff.placed() {
            let material = before.expect("placement target is on the map");
            emit(Rule::Place, Bindings::new().item(placed).material(material.name()));
            if eff == Action::PlaceStone && matches!(material, TileKind::Water | TileKind::Lava) {
                self.bridged.insert(target, material);
            }
            let cap = self.rules.shelter_pocket;
            if pocket_size(prev, cap) > cap && pocket_size(next, cap) <= cap {
                emit(Rule::Shelter, Bindings::new().item(placed));
            }
            for mob in blocked(prev, target, self.rules.block_arrow_range) {
                emit(Rule::BlockAttack, Bindings::new().mob(mob).item(placed));
            }
        }

        if let Some(tool) = eff.crafted() {
            emit(Rule::Craft, Bindings::new().item(&tool.name().replace('_', " ")));
        }
        if eff == Action::Sleep {
            emit(Rule::Sleep, Bindings::new());
        }
        if let Some(d) = next.player.last_damage {
            match d.cause {
                DamageCause::Zombie => emit(Rule::AttackedBy, Bindings::new().mob("zombie")),
                DamageCause::Arrow => emit(Rule::AttackedBy, Bindings::new().mob("skeleton")),
                _ => {}
            }
        }
    }
}

/// Attackers whose line to the player passes through `cell`.
fn blocked(prev: &EnvState, cell: Pos, arrow_range: i32) -> Vec<&'static str> {
    let mut out = Vec::new();
    let player = prev.player.pos;
    let zombie = cell
        .neighbors()
        .filter(|&n| n != player)
        .any(|n| matches!(prev.mobs.at(n), Some((MobKind::Zombie, _))));
    if zombie {
        out.push("zombie");
    }
    let facing = prev.player.facing;
    let (dx, dy) = facing.delta();
    let arrow = (1..=arrow_range).any(|j| {
        let p = cell.offset(dx * j, dy * j);
        matches!(prev.mobs.at(p), Some((MobKind::Arrow, slot))
            if prev.mobs.get(MobKind::Arrow, slot).is_some_and(|a| a.facing == facing.opposite()))
    });
    if arrow {
        out.push("skeleton");
    }
    out
}

pub(crate) fn record(episode_id: u64, t: u32, rule: Rule, caption: String) -> CaptionRecord {
    CaptionRecord {
        episode_id,
        t,
        rule_id: rule.id(),
        category: rule.category(),
        caption,
        frame_start: t.saturating_sub(4),
        frame_end: t + 1,
    }
}

/// Runs all checkers over consecutive states. `states` has one more entry than `actions`.
pub fn detect_in(episode_id: u64, states: &[EnvState], actions: &[Action]) -> Vec<CaptionRecord> {
    assert_eq!(states.len(), actions.len() + 1, "states must have one more entry than actions");
    let mut det = EventDetector::new();
    let mut out = Vec::new();
    for (t, (&a, pair)) in actions.iter().zip(states.windows(2)).enumerate() {
        for (rule, caption) in det.observe(t as u32, a, &pair[0], &pair[1]) {
            out.push(record(episode_id, t as u32, rule, caption));
        }
    }
    out
}

pub fn detect_events(trajectory: &Trajectory) -> Vec<CaptionRecord> {
    detect_in(trajectory.meta.episode_id, &trajectory.states, &trajectory.actions)
}
