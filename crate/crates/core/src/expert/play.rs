use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::policy::Expert;
use super::rollout::rollout_episode;
use crate::datakit::{container_name, write_episode, ManifestEntry, PlayManifest};
use crate::error::{Error, Result};
use crate::mechanics::EnvConfig;

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayOptions {
    pub config: EnvConfig,
    pub max_steps: usize,
    /// Store rendered RGB frames in each container.
    pub record_frames: bool,
}

impl Default for PlayOptions {
    fn default() -> Self {
        PlayOptions { config: EnvConfig::expert(), max_steps: DEFAULT_MAX_STEPS, record_frames: false }
    }
}

/// Rolls the scripted expert for `n_episodes` seeds starting at `base_seed`.
///
/// Episode `i` uses seed `base_seed + i` and id `i`. Containers and the manifest land
/// in `out_dir`; on failure everything this call wrote is removed again.
pub fn generate_play(
    base_seed: u64,
    n_episodes: usize,
    out_dir: &Path,
    workers: usize,
    opts: &PlayOptions,
) -> Result<PlayManifest> {
    if n_episodes == 0 {
        return Err(Error::InvalidConfig("need at least one episode".into()));
    }
    opts.config.validate()?;
    let created_dir = !out_dir.exists();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let result: Result<Vec<ManifestEntry>> = pool.install(|| {
        (0..n_episodes as u64)
            .into_par_iter()
            .map(|i| play_one(i, base_seed.wrapping_add(i), out_dir, opts).map_err(|e| e.in_episode(i)))
            .collect()
    });
    let manifest = result.and_then(|entries| {
        let m = PlayManifest { dir: out_dir.to_path_buf(), entries };
        m.write()?;
        Ok(m)
    });
    if manifest.is_err() {
        cleanup(out_dir, n_episodes, created_dir);
    }
    manifest
}

fn play_one(episode_id: u64, seed: u64, out_dir: &Path, opts: &PlayOptions) -> Result<ManifestEntry> {
    let mut expert = Expert::new(seed);
    let traj = rollout_episode(episode_id, seed, opts.config.clone(), &mut expert, opts.max_steps, opts.record_frames)?;
    write_episode(&traj, &out_dir.join(container_name(episode_id)))?;
    Ok(ManifestEntry {
        episode_id,
        seed,
        length: traj.len() as u32,
        unlocked: traj.final_state().achievements.bits(),
        survived: traj.meta.survived,
        score: traj.total_reward().as_f64(),
    })
}

fn cleanup(out_dir: &Path, n_episodes: usize, created_dir: bool) {
    for i in 0..n_episodes as u64 {
        let _ = fs::remove_file(out_dir.join(container_name(i)));
    }
    let _ = fs::remove_file(out_dir.join(crate::datakit::MANIFEST_FILE));
    if created_dir {
        let _ = fs::remove_dir(out_dir);
    }
}
