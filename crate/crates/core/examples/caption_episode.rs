//! Captions one expert episode and prints the detected events, optionally paraphrased.
//!
//! `cargo run --release --example caption_episode -- [seed] [steps] [paraphrases.yaml]`

use std::collections::BTreeMap;
use std::path::Path;

use crafter_foundry::caption::{detect_events, load_paraphrases, ParaphraseSampler};
use crafter_foundry::expert::{rollout, Expert};
use crafter_foundry::EnvConfig;

fn main() -> crafter_foundry::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed = args.first().and_then(|s| s.parse().ok()).unwrap_or(0);
    let steps = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let table = args.get(2).map(|p| load_paraphrases(Path::new(p))).transpose()?;

    let traj = rollout(seed, EnvConfig::expert(), &mut Expert::new(seed), steps, false)?;
    let records = detect_events(&traj);
    let mut sampler = ParaphraseSampler::new(seed);
    let mut per_rule: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &records {
        *per_rule.entry(r.rule().name()).or_default() += 1;
        let shown = match &table {
            Some(t) if t.variants(&r.caption).is_some() => sampler.sample(t, &r.caption, usize::MAX)?,
            _ => r.caption.clone(),
        };
        println!("t={:>5} frames {:>5}..={:<5} {shown}", r.t, r.frame_start, r.frame_end);
    }
    println!("\n{} records over {} steps", records.len(), traj.len());
    for (rule, n) in per_rule {
        println!("  {rule:<14}{n}");
    }
    Ok(())
}
