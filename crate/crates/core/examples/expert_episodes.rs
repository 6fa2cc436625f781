//! Runs the scripted expert over a seed range and tallies unlocks.
//!
//! `cargo run --release --example expert_episodes -- [episodes] [max_steps]`

use std::time::Instant;

use crafter_foundry::expert::{rollout, Expert};
use crafter_foundry::{Achievement, AchievementSet, EnvConfig};

fn main() -> crafter_foundry::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let episodes = args.next().unwrap_or(20);
    let max_steps = args.next().unwrap_or(10_000) as usize;
    let start = Instant::now();
    let (mut union, mut steps, mut survived) = (AchievementSet::default(), 0usize, 0);
    let mut counts = [0u32; Achievement::COUNT];
    for seed in 0..episodes {
        let t = rollout(seed, EnvConfig::default(), &mut Expert::new(seed), max_steps, false)?;
        let got = t.final_state().achievements;
        for a in got.iter() {
            counts[a.index()] += 1;
        }
        union = union.union(got);
        steps += t.len();
        survived += t.meta.survived as u32;
        println!("seed {seed:>3}: {:>5} steps, {:>2} unlocks, survived {}", t.len(), got.len(), t.meta.survived);
    }
    let secs = start.elapsed().as_secs_f64();
    println!("\n{} distinct achievements, {survived}/{episodes} survived", union.len());
    for a in Achievement::ALL {
        println!("  {:<20} {:>5.1}%", a.name(), 100.0 * counts[a.index()] as f64 / episodes as f64);
    }
    println!("{steps} steps in {secs:.1}s ({:.0} steps/s)", steps as f64 / secs);
    Ok(())
}
