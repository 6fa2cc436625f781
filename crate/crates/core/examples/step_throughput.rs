//! Raw symbolic stepping speed with a random policy.

use std::time::Instant;

use crafter_foundry::{Action, EnvConfig, EnvState, Seed, Stream};

fn main() -> crafter_foundry::Result<()> {
    let mut rng = Seed::new(0, Stream::Episode).rng();
    let mut env = EnvState::reset(0, EnvConfig::default())?;
    let total = 500_000;
    let start = Instant::now();
    let mut episodes = 1;
    for _ in 0..total {
        if env.done {
            env = EnvState::reset(episodes, EnvConfig::default())?;
            episodes += 1;
        }
        env.step(Action::ALL[rng.below(17) as usize])?;
    }
    let secs = start.elapsed().as_secs_f64();
    println!("{total} steps over {episodes} episodes in {secs:.2}s: {:.0} steps/s", total as f64 / secs);
    Ok(())
}
