//! Breadth-first navigation over the symbolic map.

use std::collections::VecDeque;

use crate::mechanics::{EnvState, Item, MobKind};
use crate::world::{Direction, Pos, TileKind, MAP_SIZE};

/// Neighbor expansion order.
pub const SEARCH_ORDER: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

const CELLS: usize = (MAP_SIZE * MAP_SIZE) as usize;

#[inline]
fn index(p: Pos) -> usize {
    (p.y * MAP_SIZE + p.x) as usize
}

/// Shortest path from `start` to the nearest cell accepted by `goal`.
/// Returns the cells after `start`, ending at the goal; empty when `start`
/// itself is a goal.
pub fn shortest_path(
    start: Pos,
    passable: impl Fn(Pos) -> bool,
    goal: impl Fn(Pos) -> bool,
    max_len: usize,
) -> Option<Vec<Pos>> {
    if goal(start) {
        return Some(Vec::new());
    }
    let mut parent = vec![u16::MAX; CELLS];
    let mut depth = vec![0u16; CELLS];
    parent[index(start)] = index(start) as u16;
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let d = depth[index(cur)] as usize;
        if d >= max_len {
            continue;
        }
        for dir in SEARCH_ORDER {
            let next = cur.step(dir);
            if !next.in_bounds() || parent[index(next)] != u16::MAX || !passable(next) {
                continue;
            }
            parent[index(next)] = index(cur) as u16;
            depth[index(next)] = (d + 1) as u16;
            if goal(next) {
                let mut path = vec![next];
                let mut at = index(next);
                while parent[at] as usize != index(start) {
                    at = parent[at] as usize;
                    path.push(Pos::new(at as i32 % MAP_SIZE, at as i32 / MAP_SIZE));
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(next);
        }
    }
    None
}

/// Breadth-first distances from one start cell, kept for repeated queries.
#[derive(Clone, Debug)]
pub struct Field {
    start: Pos,
    order: Vec<Pos>,
    parent: Vec<u16>,
    dist: Vec<u16>,
}

impl Field {
    pub fn build(start: Pos, passable: impl Fn(Pos) -> bool) -> Field {
        let mut parent = vec![u16::MAX; CELLS];
        let mut dist = vec![u16::MAX; CELLS];
        parent[index(start)] = index(start) as u16;
        dist[index(start)] = 0;
        let mut order = vec![start];
        let mut head = 0;
        while head < order.len() {
            let cur = order[head];
            head += 1;
            for dir in SEARCH_ORDER {
                let next = cur.step(dir);
                if !next.in_bounds() || parent[index(next)] != u16::MAX || !passable(next) {
                    continue;
                }
                parent[index(next)] = index(cur) as u16;
                dist[index(next)] = dist[index(cur)] + 1;
                order.push(next);
            }
        }
        Field { start, order, parent, dist }
    }

    pub fn start(&self) -> Pos {
        self.start
    }

    /// Reached cells, nearest first.
    pub fn order(&self) -> &[Pos] {
        &self.order
    }

    pub fn distance(&self, p: Pos) -> Option<usize> {
        if !p.in_bounds() {
            return None;
        }
        let d = self.dist[index(p)];
        (d != u16::MAX).then_some(d as usize)
    }

    /// First reached cell accepted by `pred`, at most `max_dist` away.
    pub fn nearest(&self, max_dist: usize, pred: impl Fn(Pos) -> bool) -> Option<Pos> {
        self.order
            .iter()
            .take_while(|&&p| self.dist[index(p)] as usize <= max_dist)
            .copied()
            .find(|&p| pred(p))
    }

    /// The cell to enter next on a shortest path to `goal`.
    pub fn first_step(&self, goal: Pos) -> Option<Pos> {
        if goal == self.start || self.distance(goal).is_none() {
            return None;
        }
        let mut at = index(goal);
        loop {
            let up = self.parent[at] as usize;
            if up == index(self.start) {
                return Some(Pos::new(at as i32 % MAP_SIZE, at as i32 / MAP_SIZE));
            }
            at = up;
        }
    }
}

/// Cells the player may walk through safely. Lava is never entered.
pub fn walkable(state: &EnvState, pos: Pos) -> bool {
    matches!(state.grid.get(pos), Some(TileKind::Grass | TileKind::Sand | TileKind::Path))
        && state.mobs.at(pos).is_none()
}

/// Whether the player could clear `pos` with current tools: mine rock, or
/// bridge water with a stone.
pub fn diggable(state: &EnvState, pos: Pos) -> bool {
    let inv = |i: Item| state.player.has(i) > 0;
    let tile = state.grid.get(pos);
    let clear = match tile {
        Some(TileKind::Stone | TileKind::CoalOre) => inv(Item::WoodPickaxe),
        Some(TileKind::IronOre) => inv(Item::StonePickaxe),
        Some(TileKind::DiamondOre) => inv(Item::IronPickaxe),
        Some(TileKind::Water) => inv(Item::Stone) && inv(Item::WoodPickaxe),
        _ => false,
    };
    clear && state.mobs.at(pos).is_none()
}

/// Cost of a path in steps, counting the extra actions spent clearing cells.
pub fn path_cost(state: &EnvState, path: &[Pos]) -> usize {
    path.iter()
        .map(|&p| match state.grid.get(p) {
            Some(TileKind::Water) => 4,
            Some(t) if t.is_rock() => 3,
            _ => 1,
        })
        .sum()
}

/// Mob of `kind` occupies `pos`.
pub fn mob_at(state: &EnvState, pos: Pos, kind: MobKind) -> bool {
    matches!(state.mobs.at(pos), Some((k, _)) if k == kind)
}
