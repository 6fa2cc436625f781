//! Play data to captions to relabeled goal chunks, in a scratch directory.
//!
//! `cargo run --release --example dataset_pipeline -- [episodes] [max_steps] [out_dir]`

use std::path::PathBuf;

use crafter_foundry::caption::{generate_caption_dataset, CaptionDatasetOptions};
use crafter_foundry::datakit::{export_goal_dataset, read_goal_dataset, RelabelConfig, DEFAULT_NOOP_THRESHOLD};
use crafter_foundry::expert::{generate_play, PlayOptions};

fn main() -> crafter_foundry::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let episodes = args.first().and_then(|s| s.parse().ok()).unwrap_or(4);
    let max_steps = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let root = args.get(2).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("foundry_pipeline"));
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let play = root.join("play");
    let opts = PlayOptions { max_steps, ..PlayOptions::default() };
    let manifest = generate_play(0, episodes, &play, workers, &opts)?;
    for e in &manifest.entries {
        println!("episode {}: {} steps, {} unlocks, score {:.1}", e.episode_id, e.length, e.unlocked_count(), e.score);
    }

    let captions = root.join("captions.jsonl");
    let cs = generate_caption_dataset(&play, &captions, None, &CaptionDatasetOptions::default())?;
    println!("{} caption records", cs.written);

    let goals = root.join("goals.jsonl");
    let gs = export_goal_dataset(&play, &captions, &RelabelConfig::default(), Some(DEFAULT_NOOP_THRESHOLD), &goals)?;
    println!("{} chunks, {} without a goal, {} of {} steps kept", gs.chunks, gs.null_goals, gs.kept_steps, gs.total_steps);

    let first = &read_goal_dataset(&goals)?[0];
    for c in first.chunks.iter().take(5) {
        println!("  steps {:>4}..={:<4} goal {:?}", c.t_start, c.t_end, c.goal.map(|g| (g.frame_start, g.frame_end)));
    }
    println!("outputs in {}", root.display());
    Ok(())
}
