//! Event-based packed hindsight relabeling.
//!
//! Chunk bounds are action timesteps. A chunk `[start, end]` is labeled with
//! the frames leading up to `end + 1`, the observation its last action produced,
//! so the goal sits `end + 1 - start` steps ahead of the chunk's first frame.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::container::read_episode;
use super::filter::{noop_filter, KeepMask};
use super::manifest::{ManifestEntry, PlayManifest};
use crate::caption::{read_caption_records, CaptionRecord};
use crate::error::{Error, Result};
use crate::expert::Trajectory;
use crate::seed::{Seed, Stream};

/// Frames in a goal segment.
pub const GOAL_FRAMES: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelabelConfig {
    pub min_goal_steps: u32,
    pub max_goal_steps: u32,
    pub uncond_probability: f64,
    pub seed: u64,
    /// `false` ignores caption segments (plain packed relabeling).
    pub event_based: bool,
}

impl Default for RelabelConfig {
    fn default() -> Self {
        RelabelConfig { min_goal_steps: 1, max_goal_steps: 10, uncond_probability: 0.1, seed: 0, event_based: true }
    }
}

impl RelabelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_goal_steps == 0 || self.min_goal_steps > self.max_goal_steps {
            return Err(Error::InvalidConfig(format!(
                "goal steps need 1 <= min <= max, got {}..{}",
                self.min_goal_steps, self.max_goal_steps
            )));
        }
        if !(0.0..=1.0).contains(&self.uncond_probability) {
            return Err(Error::InvalidConfig(format!("uncond probability {} outside [0, 1]", self.uncond_probability)));
        }
        Ok(())
    }
}

/// A maximal run of timesteps sharing one segmenting label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSegment {
    pub start: u32,
    /// Inclusive.
    pub end: u32,
    /// `None` for uncaptioned stretches.
    pub caption: Option<String>,
    pub rule_id: Option<u8>,
}

impl EventSegment {
    pub fn len(&self) -> u32 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Inclusive frame range of one episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalRef {
    pub episode_id: u64,
    pub frame_start: u32,
    pub frame_end: u32,
}

impl GoalRef {
    /// The goal segment ending at `frame`, clamped to the episode start.
    pub fn ending_at(episode_id: u64, frame: u32) -> GoalRef {
        GoalRef { episode_id, frame_start: frame.saturating_sub(GOAL_FRAMES - 1), frame_end: frame }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabeledChunk {
    /// Compacted (kept-step) indices, inclusive.
    pub start: u32,
    pub end: u32,
    /// Original timesteps of `start` and `end`.
    pub t_start: u32,
    pub t_end: u32,
    pub goal: Option<GoalRef>,
}

impl RelabeledChunk {
    pub fn len(&self) -> u32 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Steps from the chunk's first kept step to its goal.
    pub fn goal_offset(&self) -> u32 {
        self.len()
    }
}

/// Lowest-rule-id record per timestep, ties broken by caption text.
fn primary_labels(records: &[CaptionRecord], len: usize) -> Vec<Option<(u8, &str)>> {
    let mut labels: Vec<Option<(u8, &str)>> = vec![None; len];
    for r in records {
        if let Some(slot) = labels.get_mut(r.t as usize) {
            let cand = (r.rule_id, r.caption.as_str());
            if slot.is_none_or(|cur| cand < cur) {
                *slot = Some(cand);
            }
        }
    }
    labels
}

/// Partitions `[0, len)` into maximal runs of constant primary caption.
pub fn segment_events(records: &[CaptionRecord], len: usize) -> Vec<EventSegment> {
    let labels = primary_labels(records, len);
    let mut out: Vec<EventSegment> = Vec::new();
    for (t, label) in labels.iter().enumerate() {
        let caption = label.map(|(_, c)| c.to_string());
        match out.last_mut() {
            Some(seg) if seg.caption == caption => seg.end = t as u32,
            _ => out.push(EventSegment {
                start: t as u32,
                end: t as u32,
                caption,
                rule_id: label.map(|(id, _)| id),
            }),
        }
    }
    out
}

/// Relabels a full trajectory with every step kept.
pub fn event_relabel(trajectory: &Trajectory, records: &[CaptionRecord], cfg: &RelabelConfig) -> Result<Vec<RelabeledChunk>> {
    let len = trajectory.len();
    relabel_masked(trajectory.meta.episode_id, records, &KeepMask::all(len), cfg)
}

/// Relabels the kept steps of an episode of `mask.len()` actions.
///
/// Chunks are cut in compacted index space. Under `event_based`, a chunk never
/// spans two caption segments of the original timeline.
pub fn relabel_masked(episode_id: u64, records: &[CaptionRecord], mask: &KeepMask, cfg: &RelabelConfig) -> Result<Vec<RelabeledChunk>> {
    cfg.validate()?;
    let kept = mask.kept_indices();
    if kept.is_empty() {
        return Err(Error::EmptyEpisode);
    }
    let runs: Vec<(usize, usize)> = if cfg.event_based {
        let segments = segment_events(records, mask.len());
        let mut seg_of = vec![0usize; mask.len()];
        for (i, s) in segments.iter().enumerate() {
            seg_of[s.start as usize..=s.end as usize].fill(i);
        }
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for i in 0..kept.len() {
            match runs.last_mut() {
                Some(r) if seg_of[kept[r.1]] == seg_of[kept[i]] => r.1 = i,
                _ => runs.push((i, i)),
            }
        }
        runs
    } else {
        vec![(0, kept.len() - 1)]
    };

    let mut rng = Seed::new(cfg.seed, Stream::Relabel).derive(episode_id).rng();
    let (lo, hi) = (cfg.min_goal_steps as usize, cfg.max_goal_steps as usize);
    let mut chunks = Vec::new();
    for (a, b) in runs {
        let mut cursor = a;
        while cursor <= b {
            let remaining = b - cursor + 1;
            let len = if remaining < lo {
                remaining
            } else {
                let all: Vec<usize> = (lo..=hi.min(remaining)).collect();
                let clean: Vec<usize> =
                    all.iter().copied().filter(|&l| remaining - l == 0 || remaining - l >= lo).collect();
                let pool = if clean.is_empty() { all } else { clean };
                pool[rng.below(pool.len() as u32) as usize]
            };
            let uncond = rng.uniform() < cfg.uncond_probability;
            let end = cursor + len - 1;
            let t_end = kept[end] as u32;
            chunks.push(RelabeledChunk {
                start: cursor as u32,
                end: end as u32,
                t_start: kept[cursor] as u32,
                t_end,
                goal: (!uncond).then(|| GoalRef::ending_at(episode_id, t_end + 1)),
            });
            cursor = end + 1;
        }
    }
    Ok(chunks)
}

/// One episode's line in a goal dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalEpisode {
    pub episode_id: u64,
    pub length: u32,
    pub kept: u32,
    pub chunks: Vec<RelabeledChunk>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoalDatasetSummary {
    pub episodes: usize,
    pub chunks: usize,
    pub null_goals: usize,
    pub total_steps: u64,
    pub kept_steps: u64,
}

/// Filters noops, relabels every episode of a play dataset and writes one JSON line per episode.
///
/// `noop_threshold` of `None` keeps every step.
pub fn export_goal_dataset(
    play_manifest: &Path,
    caption_dataset: &Path,
    cfg: &RelabelConfig,
    noop_threshold: Option<usize>,
    out: &Path,
) -> Result<GoalDatasetSummary> {
    cfg.validate()?;
    let manifest = PlayManifest::read(play_manifest)?;
    let mut by_episode: BTreeMap<u64, Vec<CaptionRecord>> =
        manifest.entries.iter().map(|e| (e.episode_id, Vec::new())).collect();
    let mut unknown = BTreeSet::new();
    for r in read_caption_records(caption_dataset)? {
        match by_episode.get_mut(&r.episode_id) {
            Some(v) => v.push(r),
            None => {
                unknown.insert(r.episode_id);
            }
        }
    }
    if !unknown.is_empty() {
        return Err(Error::MismatchedInputs(format!("caption episodes {unknown:?} are not in the play manifest")));
    }

    let episodes: Vec<GoalEpisode> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            relabel_entry(&manifest, entry, &by_episode[&entry.episode_id], cfg, noop_threshold)
                .map_err(|e| e.in_episode(entry.episode_id))
        })
        .collect::<Result<_>>()?;

    let mut w = BufWriter::new(fs::File::create(out).map_err(|e| Error::io(out, e))?);
    let mut summary = GoalDatasetSummary::default();
    for ep in &episodes {
        serde_json::to_writer(&mut w, ep).map_err(|e| Error::Io(e.into()))?;
        w.write_all(b"\n")?;
        summary.episodes += 1;
        summary.chunks += ep.chunks.len();
        summary.null_goals += ep.chunks.iter().filter(|c| c.goal.is_none()).count();
        summary.total_steps += ep.length as u64;
        summary.kept_steps += ep.kept as u64;
    }
    w.flush()?;
    Ok(summary)
}

fn relabel_entry(
    manifest: &PlayManifest,
    entry: &ManifestEntry,
    records: &[CaptionRecord],
    cfg: &RelabelConfig,
    noop_threshold: Option<usize>,
) -> Result<GoalEpisode> {
    let actions = read_episode(&manifest.container_path(entry.episode_id))?.actions()?;
    if actions.len() != entry.length as usize {
        return Err(Error::MismatchedInputs(format!("{} actions, manifest says {}", actions.len(), entry.length)));
    }
    if let Some(r) = records.iter().find(|r| r.t as usize >= actions.len()) {
        return Err(Error::MismatchedInputs(format!("caption at t={} past the episode end", r.t)));
    }
    let mask = match noop_threshold {
        Some(th) => noop_filter(&actions, th)?,
        None => KeepMask::all(actions.len()),
    };
    let chunks = relabel_masked(entry.episode_id, records, &mask, cfg)?;
    Ok(GoalEpisode { episode_id: entry.episode_id, length: entry.length, kept: mask.kept() as u32, chunks })
}

pub fn read_goal_dataset(path: &Path) -> Result<Vec<GoalEpisode>> {
    let reader = BufReader::new(fs::File::open(path).map_err(|e| Error::io(path, e))?);
    reader
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| {
            let l = l?;
            serde_json::from_str(&l).map_err(|e| Error::MismatchedInputs(format!("goal dataset line: {e}")))
        })
        .collect()
}
