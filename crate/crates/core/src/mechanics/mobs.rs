//! Creature behavior and population balancing.

use super::defaults::Mechanics;
use super::state::{DamageCause, EnvState, MobKind, ARROW_SPACE};
use crate::world::{Direction, Pos, TileKind};

/// Unit step along the longer (or shorter) axis of `offset`.
fn toward(offset: (i32, i32), long_axis: bool) -> Option<Direction> {
    let (dx, dy) = offset;
    let horizontal = if long_axis {
        dx.abs() > dy.abs()
    } else {
        dx.abs() <= dy.abs()
    };
    if horizontal {
        Direction::from_delta(dx.signum(), 0)
    } else {
        Direction::from_delta(0, dy.signum())
    }
}

impl EnvState {
    fn random_direction(&mut self) -> Direction {
        Direction::ALL[self.rng.below(4) as usize]
    }

    /// Moves the mob in `slot` one cell if the target is free. Turns it either way.
    fn move_mob(&mut self, kind: MobKind, slot: usize, dir: Direction) -> bool {
        let Some(mob) = self.mobs.slots(kind)[slot] else {
            return false;
        };
        let target = mob.pos.step(dir);
        let free = self.is_free(target, kind.space());
        let m = self.mobs.slots_mut(kind)[slot].as_mut().expect("live slot");
        m.facing = dir;
        if free {
            m.pos = target;
        }
        free
    }

    pub(crate) fn update_mobs(&mut self, m: &Mechanics) {
        for slot in 0..self.mobs.arrows.len() {
            self.update_arrow(m, slot);
        }
        for slot in 0..self.mobs.zombies.len() {
            self.update_zombie(m, slot);
        }
        for slot in 0..self.mobs.skeletons.len() {
            self.update_skeleton(m, slot);
        }
        for slot in 0..self.mobs.cows.len() {
            if self.mobs.cows[slot].is_some() && self.rng.uniform() < m.mobs.cow_move_prob {
                let dir = self.random_direction();
                self.move_mob(MobKind::Cow, slot, dir);
            }
        }
    }

    fn update_arrow(&mut self, m: &Mechanics, slot: usize) {
        let Some(arrow) = self.mobs.arrows[slot] else {
            return;
        };
        let target = arrow.pos.step(arrow.facing);
        if target == self.player.pos {
            self.player.hurt(DamageCause::Arrow, m.combat.arrow_damage);
            self.mobs.arrows[slot] = None;
        } else if self.is_free(target, ARROW_SPACE) {
            self.mobs.arrows[slot].as_mut().expect("live arrow").pos = target;
        } else {
            self.mobs.arrows[slot] = None;
            if matches!(self.grid.get(target), Some(TileKind::Table | TileKind::Furnace)) {
                self.grid.set(target, TileKind::Path);
            }
        }
    }

    fn update_zombie(&mut self, m: &Mechanics, slot: usize) {
        let Some(zombie) = self.mobs.zombies[slot] else {
            return;
        };
        let r = &m.mobs;
        let player = self.player.pos;
        let offset = (player.x - zombie.pos.x, player.y - zombie.pos.y);
        let dist = zombie.pos.chebyshev(player);
        let dir = if dist <= r.zombie_chase_range && self.rng.uniform() < r.zombie_chase_prob {
            let long = self.rng.uniform() < r.zombie_long_axis_prob;
            toward(offset, long)
        } else {
            Some(self.random_direction())
        };
        if let Some(dir) = dir {
            self.move_mob(MobKind::Zombie, slot, dir);
        }
        let zombie = self.mobs.zombies[slot].as_mut().expect("live zombie");
        if zombie.pos.manhattan(player) == 1 {
            if zombie.cooldown > 0 {
                zombie.cooldown -= 1;
            } else {
                zombie.cooldown = m.combat.zombie_cooldown;
                let damage = if self.player.sleeping {
                    m.combat.zombie_sleeping_damage
                } else {
                    m.combat.zombie_damage
                };
                self.player.hurt(DamageCause::Zombie, damage);
            }
        }
    }

    fn update_skeleton(&mut self, m: &Mechanics, slot: usize) {
        let Some(skeleton) = self.mobs.skeletons[slot].as_mut() else {
            return;
        };
        skeleton.cooldown = (skeleton.cooldown - 1).max(0);
        let skeleton = *skeleton;
        let r = &m.mobs;
        let player = self.player.pos;
        let offset = (player.x - skeleton.pos.x, player.y - skeleton.pos.y);
        let dist = skeleton.pos.chebyshev(player);
        let reloaded = skeleton.cooldown == 0;

        if dist <= r.skeleton_retreat_range && self.rng.uniform() < r.skeleton_retreat_prob {
            if let Some(dir) = toward(offset, true) {
                self.move_mob(MobKind::Skeleton, slot, dir.opposite());
            }
        } else if dist <= r.skeleton_shoot_range && reloaded && self.rng.uniform() < r.skeleton_shoot_prob {
            if let Some(dir) = toward(offset, true) {
                self.mobs.skeletons[slot].as_mut().expect("live skeleton").facing = dir;
                let from = skeleton.pos.step(dir);
                if self.is_free(from, ARROW_SPACE) && self.mobs.count(MobKind::Arrow) < r.arrow_cap {
                    let arrow = self.new_mob(from, 1, dir);
                    self.mobs.insert(MobKind::Arrow, arrow, r.arrow_cap);
                    self.mobs.skeletons[slot].as_mut().expect("live skeleton").cooldown = m.combat.skeleton_reload;
                }
            }
        } else if dist <= r.skeleton_chase_range && self.rng.uniform() < r.skeleton_chase_prob {
            if let Some(dir) = toward(offset, true) {
                self.move_mob(MobKind::Skeleton, slot, dir);
            }
        } else if self.rng.uniform() < r.skeleton_wander_prob {
            let dir = self.random_direction();
            self.move_mob(MobKind::Skeleton, slot, dir);
        }
    }

    /// Despawns far creatures and spawns new ones around the player.
    pub(crate) fn balance_mobs(&mut self, m: &Mechanics) {
        let r = &m.mobs;
        let darkness = 1.0 - self.light_level as f64;
        let zombie_prob = r.zombie_spawn_prob_day + (r.zombie_spawn_prob_night - r.zombie_spawn_prob_day) * darkness;
        let table = [
            (MobKind::Zombie, r.zombie_cap, r.zombie_health, zombie_prob, r.zombie_min_distance, r.zombie_despawn_prob, TileKind::Grass),
            (MobKind::Skeleton, r.skeleton_cap, r.skeleton_health, r.skeleton_spawn_prob, r.skeleton_min_distance, r.skeleton_despawn_prob, TileKind::Path),
            (MobKind::Cow, r.cow_cap, r.cow_health, r.cow_spawn_prob, r.cow_min_distance, r.cow_despawn_prob, TileKind::Grass),
        ];
        let player = self.player.pos;
        for (kind, cap, health, spawn_prob, min_distance, despawn_prob, ground) in table {
            for slot in 0..kind.slots() {
                if let Some(mob) = self.mobs.slots(kind)[slot] {
                    if mob.pos.chebyshev(player) > r.despawn_distance && self.rng.uniform() < despawn_prob {
                        self.mobs.slots_mut(kind)[slot] = None;
                    }
                }
            }
            if self.mobs.count(kind) >= cap {
                continue;
            }
            let dx = self.rng.range_inclusive(-r.spawn_radius as i64, r.spawn_radius as i64) as i32;
            let dy = self.rng.range_inclusive(-r.spawn_radius as i64, r.spawn_radius as i64) as i32;
            let u = self.rng.uniform();
            let pos: Pos = player.offset(dx, dy);
            if u < spawn_prob
                && self.grid.get(pos) == Some(ground)
                && pos.chebyshev(player) >= min_distance
                && self.is_free(pos, kind.space())
            {
                let mob = self.new_mob(pos, health, Direction::Down);
                self.mobs.insert(kind, mob, cap);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toward_prefers_axis() {
        assert_eq!(toward((3, 1), true), Some(Direction::Right));
        assert_eq!(toward((3, 1), false), Some(Direction::Down));
        assert_eq!(toward((0, -2), true), Some(Direction::Up));
        assert_eq!(toward((0, 0), true), None);
    }
}
