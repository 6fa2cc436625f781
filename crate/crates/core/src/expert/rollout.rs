use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanics::{AchievementSet, Action, EnvConfig, EnvState, Reward};
use crate::render::{render, Frame};

/// Anything that picks an action from a symbolic state.
pub trait Policy {
    fn act(&mut self, state: &EnvState) -> Action;
}

impl<F: FnMut(&EnvState) -> Action> Policy for F {
    fn act(&mut self, state: &EnvState) -> Action {
        self(state)
    }
}

/// Always `noop`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoopPolicy;

impl Policy for NoopPolicy {
    fn act(&mut self, _: &EnvState) -> Action {
        Action::Noop
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub episode_id: u64,
    pub seed: u64,
    pub config: EnvConfig,
    pub survived: bool,
}

/// One recorded episode: `L + 1` states and `L` actions.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub states: Vec<EnvState>,
    pub frames: Option<Vec<Frame>>,
    pub actions: Vec<Action>,
    pub rewards: Vec<Reward>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn achievements(&self) -> Vec<AchievementSet> {
        self.states.iter().map(|s| s.achievements).collect()
    }

    pub fn final_state(&self) -> &EnvState {
        self.states.last().expect("trajectory holds at least the reset state")
    }

    pub fn total_reward(&self) -> Reward {
        self.rewards.iter().copied().sum()
    }

    /// Frames, rendered from states when they were not recorded.
    pub fn frames_or_render(&self) -> Vec<Frame> {
        match &self.frames {
            Some(f) => f.clone(),
            None => self.states.iter().map(render).collect(),
        }
    }

    /// Re-runs the stored actions from the stored seed and config.
    pub fn replay(&self) -> Result<Trajectory> {
        replay(self.meta.episode_id, self.meta.seed, self.meta.config.clone(), &self.actions, self.frames.is_some())
    }
}

/// Runs `policy` from reset until the episode ends or `max_steps` pass.
pub fn rollout(
    seed: u64,
    config: EnvConfig,
    policy: &mut dyn Policy,
    max_steps: usize,
    record_frames: bool,
) -> Result<Trajectory> {
    rollout_episode(seed, seed, config, policy, max_steps, record_frames)
}

/// [`rollout`] with an explicit episode id.
pub fn rollout_episode(
    episode_id: u64,
    seed: u64,
    config: EnvConfig,
    policy: &mut dyn Policy,
    max_steps: usize,
    record_frames: bool,
) -> Result<Trajectory> {
    if max_steps == 0 {
        return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
    }
    let mut taken = 0;
    record(episode_id, seed, config, record_frames, |s| {
        taken += 1;
        (taken <= max_steps).then(|| policy.act(s))
    })
}

/// Rebuilds a trajectory from its action script.
pub fn replay(episode_id: u64, seed: u64, config: EnvConfig, actions: &[Action], record_frames: bool) -> Result<Trajectory> {
    let mut script = actions.iter().copied();
    let t = record(episode_id, seed, config, record_frames, |_| script.next())?;
    if t.actions.len() != actions.len() {
        return Err(Error::MismatchedInputs(format!(
            "episode ended after {} of {} actions",
            t.actions.len(),
            actions.len()
        )));
    }
    Ok(t)
}

fn record(
    episode_id: u64,
    seed: u64,
    config: EnvConfig,
    record_frames: bool,
    mut next: impl FnMut(&EnvState) -> Option<Action>,
) -> Result<Trajectory> {
    let mut state = EnvState::reset(seed, config.clone())?;
    let mut frames = record_frames.then(|| vec![render(&state)]);
    let mut states = vec![state.clone()];
    let (mut actions, mut rewards) = (Vec::new(), Vec::new());
    while !state.done {
        let Some(action) = next(&state) else { break };
        let result = state.step(action)?;
        actions.push(action);
        rewards.push(result.reward);
        if let Some(f) = frames.as_mut() {
            f.push(render(&state));
        }
        states.push(state.clone());
    }
    let survived = state.player.health > 0;
    Ok(Trajectory {
        meta: TrajectoryMeta { episode_id, seed, config, survived },
        states,
        frames,
        actions,
        rewards,
    })
}
