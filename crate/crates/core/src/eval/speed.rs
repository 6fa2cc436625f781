use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mechanics::{Action, EnvConfig, EnvState};
use crate::render::{render_into, FRAME_HEIGHT, FRAME_WIDTH};
use crate::seed::{Seed, Stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Throughput {
    pub steps: u64,
    pub step_seconds: f64,
    pub steps_per_second: f64,
    pub frames: u64,
    pub render_seconds: f64,
    pub frames_per_second: f64,
}

/// Single-threaded symbolic stepping under random actions, then rendering of the visited states.
pub fn measure_throughput(steps: u64, frames: u64, seed: u64) -> Result<Throughput> {
    let config = EnvConfig::default();
    let mut rng = Seed::new(seed, Stream::Episode).derive(u64::MAX).rng();
    let actions: Vec<Action> = (0..steps).map(|_| Action::ALL[rng.below(Action::ALL.len() as u32) as usize]).collect();

    let mut env = EnvState::reset(seed, config.clone())?;
    let mut resets = 1;
    let start = Instant::now();
    for &a in &actions {
        if env.done {
            env = EnvState::reset(seed + resets, config.clone())?;
            resets += 1;
        }
        env.step(a)?;
    }
    let step_seconds = start.elapsed().as_secs_f64();

    let mut env = EnvState::reset(seed, config.clone())?;
    let mut buf = vec![0u8; FRAME_WIDTH * FRAME_HEIGHT * 3];
    let start = Instant::now();
    for i in 0..frames {
        if env.done {
            env = EnvState::reset(seed + i, config.clone())?;
        }
        env.step(actions[i as usize % actions.len().max(1)])?;
        render_into(&env, &mut buf);
    }
    let render_seconds = start.elapsed().as_secs_f64();

    Ok(Throughput {
        steps,
        step_seconds,
        steps_per_second: steps as f64 / step_seconds.max(1e-9),
        frames,
        render_seconds,
        frames_per_second: frames as f64 / render_seconds.max(1e-9),
    })
}
