use serde::{Deserialize, Serialize};

use super::defaults::{mechanics, Mechanics, Yield};
use super::state::{DamageCause, EnvState, MobKind};
use super::types::{Achievement, AchievementSet, Action, Item, Reward};
use crate::error::{Error, Result};
use crate::world::{Plant, Pos, TileKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub effective_action: Action,
    /// Achievements unlocked for the first time this step.
    pub unlocked: AchievementSet,
    /// Achievement-like events that happened this step, repeats included.
    pub events: AchievementSet,
    pub health_delta: i32,
    pub death_cause: Option<DamageCause>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub reward: Reward,
    pub done: bool,
    pub info: StepInfo,
}

/// Reward for the transition `prev -> next`, in tenths.
pub fn compute_reward(prev: &EnvState, next: &EnvState) -> Reward {
    reward_between(prev.achievements, prev.player.health, next)
}

fn reward_between(prev_achievements: AchievementSet, prev_health: i32, next: &EnvState) -> Reward {
    let unlocks = next.achievements.difference(prev_achievements).len() as i32;
    let mut reward = Reward(10 * unlocks + (next.player.health - prev_health));
    if next.config.death_penalty_enabled && next.player.health <= 0 && prev_health > 0 {
        reward += Reward::from_f64(next.config.death_penalty);
    }
    reward
}

/// The action that will take effect: `action` itself or `Noop`.
pub fn legal_effective_action(state: &EnvState, action: Action) -> Action {
    if state.player.sleeping {
        return Action::Noop;
    }
    let m = mechanics();
    let legal = match action {
        Action::Noop => true,
        Action::MoveLeft | Action::MoveRight | Action::MoveUp | Action::MoveDown => true,
        Action::Do => can_do(state, m),
        Action::Sleep => state.player.energy < m.player.max_stat,
        Action::PlaceStone | Action::PlaceTable | Action::PlaceFurnace | Action::PlacePlant => {
            can_place(state, m, action)
        }
        _ => can_make(state, m, action),
    };
    if legal {
        action
    } else {
        Action::Noop
    }
}

fn can_do(state: &EnvState, m: &Mechanics) -> bool {
    let target = state.player.target();
    let Some(material) = state.grid.get(target) else {
        return false;
    };
    if let Some((kind, _)) = state.mobs.at(target) {
        return kind != MobKind::Arrow;
    }
    if material == TileKind::Plant {
        return state
            .grid
            .plant_at(target)
            .is_some_and(|(_, p)| p.grown > m.plants.ripe_after);
    }
    match m.collect_rule(material) {
        Some(rule) => rule.require.iter().all(|&r| state.player.has(r) > 0),
        None => false,
    }
}

fn has_costs(state: &EnvState, uses: &[(Item, u8)]) -> bool {
    uses.iter().all(|&(item, n)| state.player.has(item) >= n)
}

fn has_nearby(state: &EnvState, m: &Mechanics, kinds: &[TileKind]) -> bool {
    kinds
        .iter()
        .all(|&k| state.nearby(state.player.pos, m.player.nearby_radius, k))
}

fn placed_material(action: Action) -> TileKind {
    match action {
        Action::PlaceStone => TileKind::Stone,
        Action::PlaceTable => TileKind::Table,
        Action::PlaceFurnace => TileKind::Furnace,
        _ => TileKind::Plant,
    }
}

fn can_place(state: &EnvState, m: &Mechanics, action: Action) -> bool {
    let material = placed_material(action);
    let Some(rule) = m.place_rule(material) else {
        return false;
    };
    let target = state.player.target();
    let Some(current) = state.grid.get(target) else {
        return false;
    };
    if !rule.targets.contains(&current) || state.mobs.at(target).is_some() {
        return false;
    }
    if material == TileKind::Plant && state.grid.plant_count() >= state.grid.plants.len() {
        return false;
    }
    has_costs(state, &rule.uses) && has_nearby(state, m, &rule.nearby)
}

fn can_make(state: &EnvState, m: &Mechanics, action: Action) -> bool {
    let Some(rule) = action.crafted().and_then(|tool| m.make_rule(tool)) else {
        return false;
    };
    has_costs(state, &rule.uses) && has_nearby(state, m, &rule.nearby)
}

impl EnvState {
    /// Advances one step in place.
    pub fn step(&mut self, action: Action) -> Result<StepResult> {
        if self.done {
            return Err(Error::SteppedTerminal);
        }
        let m = mechanics();
        let prev_achievements = self.achievements;
        let prev_health = self.player.health;
        self.player.last_damage = None;
        let mut events = AchievementSet::EMPTY;

        let effective = legal_effective_action(self, action);
        self.update_life_stats(m);
        self.degen_or_regen(m);
        if self.player.sleeping
            && self.player.energy >= m.player.max_stat
            && self.light_level > m.player.wake_light
        {
            self.player.sleeping = false;
            events.insert(Achievement::WakeUp);
        }
        self.apply(m, effective, &mut events);

        if self.config.mobs_enabled {
            self.update_mobs(m);
        }
        self.update_plants(m);
        if self.config.mobs_enabled {
            self.balance_mobs(m);
        }

        let p = &mut self.player;
        if p.last_damage.is_some_and(|d| d.cause != DamageCause::Starvation) {
            p.sleeping = false;
        }
        let max = m.player.max_stat;
        p.health = p.health.clamp(0, max);
        p.food = p.food.clamp(0, max);
        p.drink = p.drink.clamp(0, max);
        p.energy = p.energy.clamp(0, max);

        self.achievements = self.achievements.union(events);
        self.step_count += 1;
        self.light_level = m.daylight(self.step_count);
        self.done = self.player.health <= 0 || self.step_count >= self.config.episode_limit;

        let death_cause = (self.player.health <= 0).then(|| {
            self.player
                .last_damage
                .map_or(DamageCause::Starvation, |d| d.cause)
        });
        Ok(StepResult {
            reward: reward_between(prev_achievements, prev_health, self),
            done: self.done,
            info: StepInfo {
                effective_action: effective,
                unlocked: self.achievements.difference(prev_achievements),
                events,
                health_delta: self.player.health - prev_health,
                death_cause,
            },
        })
    }

    fn update_life_stats(&mut self, m: &Mechanics) {
        let r = &m.player;
        let p = &mut self.player;
        if self.config.survival_decay_enabled {
            let rate = if p.sleeping { r.sleeping_decay_rate } else { 1.0 };
            p.hunger += rate;
            if p.hunger > r.hunger_threshold {
                p.hunger = 0.0;
                p.food -= 1;
            }
            p.thirst += rate;
            if p.thirst > r.thirst_threshold {
                p.thirst = 0.0;
                p.drink -= 1;
            }
        }
        if p.sleeping {
            p.fatigue = (p.fatigue - 1.0).min(0.0);
        } else if self.config.survival_decay_enabled {
            p.fatigue += 1.0;
        }
        if p.fatigue < r.fatigue_recover_threshold {
            p.fatigue = 0.0;
            p.energy = (p.energy + 1).min(r.max_stat);
        }
        if p.fatigue > r.fatigue_threshold {
            p.fatigue = 0.0;
            p.energy -= 1;
        }
        p.food = p.food.max(0);
        p.drink = p.drink.max(0);
        p.energy = p.energy.max(0);
    }

    fn degen_or_regen(&mut self, m: &Mechanics) {
        let r = &m.player;
        let p = &mut self.player;
        let necessities = p.food > 0 && p.drink > 0 && (p.energy > 0 || p.sleeping);
        if necessities {
            p.recover += if p.sleeping { r.sleeping_recover_rate } else { 1.0 };
        } else if self.config.health_decay_enabled {
            p.recover -= if p.sleeping { r.sleeping_degen_rate } else { 1.0 };
        }
        if p.recover > r.recover_threshold {
            p.recover = 0.0;
            p.health = (p.health + 1).min(r.max_stat);
        }
        if p.recover < r.degen_threshold {
            p.recover = 0.0;
            p.hurt(DamageCause::Starvation, 1);
        }
    }

    fn apply(&mut self, m: &Mechanics, action: Action, events: &mut AchievementSet) {
        match action {
            Action::Noop => {}
            Action::MoveLeft | Action::MoveRight | Action::MoveUp | Action::MoveDown => {
                let dir = action.direction().expect("move action");
                self.player.facing = dir;
                let target = self.player.pos.step(dir);
                if self.is_free(target, self.config.player_space()) {
                    self.player.pos = target;
                    if self.grid.get(target) == Some(TileKind::Lava) {
                        let health = self.player.health;
                        self.player.hurt(DamageCause::Lava, health);
                    }
                }
            }
            Action::Do => self.interact(m, events),
            Action::Sleep => self.player.sleeping = true,
            Action::PlaceStone | Action::PlaceTable | Action::PlaceFurnace | Action::PlacePlant => {
                let material = placed_material(action);
                let rule = m.place_rule(material).expect("checked by legality");
                let target = self.player.target();
                for &(item, n) in &rule.uses {
                    self.player.inventory[item.index()] -= n;
                }
                self.grid.set(target, material);
                if material == TileKind::Plant {
                    let slot = self.grid.plants.iter_mut().find(|s| s.is_none()).expect("checked by legality");
                    *slot = Some(Plant {
                        pos: target,
                        grown: 0,
                        health: m.plants.health,
                    });
                }
                events.insert(Achievement::place(material.name()).expect("placeable material"));
            }
            _ => {
                let tool = action.crafted().expect("craft action");
                let rule = m.make_rule(tool).expect("checked by legality");
                for &(item, n) in &rule.uses {
                    self.player.inventory[item.index()] -= n;
                }
                let slot = &mut self.player.inventory[tool.index()];
                *slot = (*slot + 1).min(m.player.max_item);
                events.insert(Achievement::make(tool).expect("craftable tool"));
            }
        }
    }

    fn interact(&mut self, m: &Mechanics, events: &mut AchievementSet) {
        let target = self.player.target();
        if let Some((kind, slot)) = self.mobs.at(target) {
            let damage = m.player_damage(&self.player.inventory);
            let mob = self.mobs.slots_mut(kind)[slot].as_mut().expect("occupied slot");
            mob.health -= damage;
            if mob.health <= 0 {
                self.mobs.slots_mut(kind)[slot] = None;
                match kind {
                    MobKind::Cow => {
                        self.player.food = (self.player.food + m.food.cow).min(m.player.max_stat);
                        self.player.hunger = 0.0;
                        events.insert(Achievement::EatCow);
                    }
                    MobKind::Zombie => events.insert(Achievement::DefeatZombie),
                    MobKind::Skeleton => events.insert(Achievement::DefeatSkeleton),
                    MobKind::Arrow => {}
                }
            }
            return;
        }
        let material = self.grid.get(target).expect("checked by legality");
        if material == TileKind::Plant {
            let (i, _) = self.grid.plant_at(target).expect("plant tile has a slot");
            if let Some(plant) = self.grid.plants[i].as_mut() {
                plant.grown = 0;
            }
            self.player.food = (self.player.food + m.food.plant).min(m.player.max_stat);
            self.player.hunger = 0.0;
            events.insert(Achievement::EatPlant);
            return;
        }
        let rule = m.collect_rule(material).expect("checked by legality");
        if rule.probability < 1.0 && self.rng.uniform() >= rule.probability {
            return;
        }
        self.grid.set(target, rule.leaves);
        match rule.receive {
            Yield::Drink => {
                self.player.drink = (self.player.drink + m.food.water).min(m.player.max_stat);
                self.player.thirst = 0.0;
                events.insert(Achievement::CollectDrink);
            }
            Yield::Item(item) => {
                let slot = &mut self.player.inventory[item.index()];
                *slot = (*slot + 1).min(m.player.max_item);
                events.insert(Achievement::collect(item.name()).expect("collectible item"));
            }
        }
    }

    fn update_plants(&mut self, m: &Mechanics) {
        for i in 0..self.grid.plants.len() {
            let Some(mut plant) = self.grid.plants[i] else {
                continue;
            };
            plant.grown = plant.grown.saturating_add(1);
            let attacked = plant.pos.neighbors().any(|n| {
                matches!(self.mobs.at(n), Some((MobKind::Zombie | MobKind::Skeleton, _)))
            });
            if attacked {
                plant.health -= m.plants.zombie_damage;
            }
            if plant.health <= 0 {
                self.grid.plants[i] = None;
                self.grid.set(plant.pos, TileKind::Grass);
            } else {
                self.grid.plants[i] = Some(plant);
            }
        }
    }

    /// Steps until the plant at `pos` is ripe, if there is one.
    pub fn plant_ripe_in(&self, pos: Pos) -> Option<u32> {
        let ripe_after = mechanics().plants.ripe_after;
        self.grid
            .plant_at(pos)
            .map(|(_, p)| (ripe_after + 1).saturating_sub(p.grown))
    }
}
