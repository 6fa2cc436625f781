use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanics::{Achievement, Action, EnvConfig, EnvState, Item, StepResult};
use crate::world::{Direction, TileKind};

/// Multi-step tasks, then the single-instruction tasks.
pub const TASK_IDS: [&str; 10] = [
    "T1",
    "T2",
    "T3",
    "T4",
    "collect_sapling",
    "collect_drink",
    "make_wood_pickaxe",
    "make_wood_sword",
    "make_stone_pickaxe",
    "make_stone_sword",
];

pub const TASK_STEP_LIMIT: u32 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub subtasks: Vec<Achievement>,
    pub config: EnvConfig,
    pub step_limit: u32,
    /// Items added to the inventory at reset.
    pub grants: Vec<(Item, u8)>,
    /// Put a table next to the player at reset.
    pub table_nearby: bool,
}

impl TaskSpec {
    pub fn by_id(id: &str) -> Result<TaskSpec> {
        use Achievement as A;
        let multi = |subtasks: Vec<Achievement>, config: EnvConfig| TaskSpec {
            id: id.to_string(),
            subtasks,
            config,
            step_limit: TASK_STEP_LIMIT,
            grants: Vec::new(),
            table_nearby: false,
        };
        let single = |ach: Achievement, grants: Vec<(Item, u8)>, table_nearby: bool| TaskSpec {
            id: id.to_string(),
            subtasks: vec![ach],
            config: EnvConfig::default(),
            step_limit: TASK_STEP_LIMIT,
            grants,
            table_nearby,
        };
        Ok(match id {
            "T1" => multi(vec![A::CollectSapling, A::PlacePlant, A::EatPlant], EnvConfig::peaceful()),
            "T2" => multi(vec![A::PlacePlant, A::PlaceTable], EnvConfig::default()),
            "T3" => multi(vec![A::MakeWoodPickaxe, A::CollectSapling], EnvConfig::default()),
            "T4" => multi(vec![A::CollectCoal, A::MakeWoodPickaxe, A::CollectStone], EnvConfig::default()),
            "collect_sapling" => single(A::CollectSapling, vec![], false),
            "collect_drink" => single(A::CollectDrink, vec![], false),
            "make_wood_pickaxe" => single(A::MakeWoodPickaxe, vec![(Item::Wood, 1)], true),
            "make_wood_sword" => single(A::MakeWoodSword, vec![(Item::Wood, 1)], true),
            "make_stone_pickaxe" => single(A::MakeStonePickaxe, vec![(Item::Wood, 1), (Item::Stone, 1)], true),
            "make_stone_sword" => single(A::MakeStoneSword, vec![(Item::Wood, 1), (Item::Stone, 1)], true),
            other => return Err(Error::UnknownTask(other.to_string())),
        })
    }

    /// A task over an arbitrary ordered sub-task list in the default world.
    pub fn custom(id: &str, subtasks: Vec<Achievement>) -> Result<TaskSpec> {
        let spec = TaskSpec {
            id: id.to_string(),
            subtasks,
            config: EnvConfig::default(),
            step_limit: TASK_STEP_LIMIT,
            grants: Vec::new(),
            table_nearby: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.subtasks.is_empty() {
            return Err(Error::UnknownTask(format!("{} has no sub-tasks", self.id)));
        }
        if self.step_limit == 0 {
            return Err(Error::InvalidConfig("task step limit must be at least 1".into()));
        }
        self.config.validate()
    }
}

/// Outcome of one task step.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskStep {
    pub reward: u32,
    pub done: bool,
    pub completed: Vec<Achievement>,
    pub inner: StepResult,
}

/// The environment wrapped with sequenced sparse rewards.
#[derive(Clone, Debug)]
pub struct TaskEnv {
    spec: TaskSpec,
    state: EnvState,
    cursor: usize,
    total: u32,
    steps: u32,
    log: Vec<(u32, Achievement)>,
}

/// Resets a task environment.
pub fn make_task_env(spec: &TaskSpec, seed: u64) -> Result<TaskEnv> {
    spec.validate()?;
    let mut state = EnvState::reset(seed, spec.config.clone())?;
    for &(item, n) in &spec.grants {
        state.player.inventory[item.index()] = state.player.inventory[item.index()].saturating_add(n);
    }
    if spec.table_nearby {
        let pos = state.player.pos.step(Direction::Left);
        if pos.in_bounds() {
            state.grid.set(pos, TileKind::Table);
            if let Some((kind, slot)) = state.mobs.at(pos) {
                state.mobs.slots_mut(kind)[slot] = None;
            }
        }
    }
    Ok(TaskEnv { spec: spec.clone(), state, cursor: 0, total: 0, steps: 0, log: Vec::new() })
}

impl TaskEnv {
    /// Wraps an already prepared state; grants and table placement are not applied.
    pub fn from_state(spec: &TaskSpec, state: EnvState) -> Result<TaskEnv> {
        spec.validate()?;
        Ok(TaskEnv { spec: spec.clone(), state, cursor: 0, total: 0, steps: 0, log: Vec::new() })
    }

    pub fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    /// Index of the next expected sub-task.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn total_reward(&self) -> u32 {
        self.total
    }

    pub fn is_complete(&self) -> bool {
        self.cursor == self.spec.subtasks.len()
    }

    pub fn is_done(&self) -> bool {
        self.is_complete() || self.state.done || self.steps >= self.spec.step_limit
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// `(step, sub-task)` for every in-order completion.
    pub fn log(&self) -> &[(u32, Achievement)] {
        &self.log
    }

    pub fn step(&mut self, action: Action) -> Result<TaskStep> {
        if self.is_done() {
            return Err(Error::SteppedTerminal);
        }
        let inner = self.state.step(action)?;
        self.steps += 1;
        let mut completed = Vec::new();
        let mut events = inner.info.events;
        while let Some(&next) = self.spec.subtasks.get(self.cursor) {
            if !events.contains(next) {
                break;
            }
            events = events.difference([next].into_iter().collect());
            completed.push(next);
            self.log.push((self.steps, next));
            self.cursor += 1;
        }
        let reward = completed.len() as u32;
        self.total += reward;
        Ok(TaskStep { reward, done: self.is_done(), completed, inner })
    }
}

/// Task reward for an event log: the longest in-order prefix of `subtasks`.
pub fn ordered_prefix(subtasks: &[Achievement], events: &[Achievement]) -> usize {
    let mut cursor = 0;
    for &e in events {
        if subtasks.get(cursor) == Some(&e) {
            cursor += 1;
        }
    }
    cursor
}

/// Result of one task episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task: String,
    pub seed: u64,
    pub completed: bool,
    pub steps: u32,
    pub reward: u32,
    /// `(step, sub-task)` per in-order completion.
    pub log: Vec<(u32, Achievement)>,
}

/// Drives a task episode with `agent(state, cursor)` until it completes, dies or hits the limit.
pub fn run_task_episode(
    spec: &TaskSpec,
    seed: u64,
    mut agent: impl FnMut(&EnvState, usize) -> Result<Action>,
) -> Result<TaskOutcome> {
    let mut env = make_task_env(spec, seed)?;
    while !env.is_done() {
        let action = agent(env.state(), env.cursor())?;
        env.step(action)?;
    }
    Ok(TaskOutcome {
        task: spec.id.clone(),
        seed,
        completed: env.is_complete(),
        steps: env.steps(),
        reward: env.total_reward(),
        log: env.log().to_vec(),
    })
}
