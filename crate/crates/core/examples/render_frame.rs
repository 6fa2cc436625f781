//! Renders the first frame of an episode to PNG and times the renderer.

use std::path::PathBuf;
use std::time::Instant;

use crafter_foundry::render::{render_into, save_png, render, FRAME_BYTES};
use crafter_foundry::{EnvConfig, EnvState};

fn main() -> crafter_foundry::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = PathBuf::from(std::env::args().nth(2).unwrap_or_else(|| "frame.png".into()));
    let state = EnvState::reset(seed, EnvConfig::default())?;
    save_png(&render(&state), &out)?;
    println!("wrote {}", out.display());

    let mut buf = vec![0; FRAME_BYTES];
    let n = 20_000;
    let start = Instant::now();
    for _ in 0..n {
        render_into(&state, &mut buf);
    }
    println!("{:.0} frames/s", n as f64 / start.elapsed().as_secs_f64());
    Ok(())
}
