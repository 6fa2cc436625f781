use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.tsv";
const MANIFEST_COLUMNS: [&str; 6] = ["episode_id", "seed", "length", "unlocked", "survived", "score"];

/// Per-episode stats of a play dataset.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub episode_id: u64,
    pub seed: u64,
    pub length: u32,
    /// Bit `i` set when achievement `i` was unlocked.
    pub unlocked: u32,
    pub survived: bool,
    /// Summed environment reward.
    pub score: f64,
}

impl ManifestEntry {
    pub fn unlocked_count(&self) -> u32 {
        self.unlocked.count_ones()
    }
}

/// A play dataset: containers in `dir` plus the TSV index.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayManifest {
    pub dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

pub fn container_name(episode_id: u64) -> String {
    format!("episode_{episode_id:06}.cdj")
}

impl PlayManifest {
    pub fn container_path(&self, episode_id: u64) -> PathBuf {
        self.dir.join(container_name(episode_id))
    }

    pub fn entry(&self, episode_id: u64) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.episode_id == episode_id)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = MANIFEST_COLUMNS.join("\t");
        out.push('\n');
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:.1}",
                e.episode_id, e.seed, e.length, e.unlocked, e.survived as u8, e.score
            );
        }
        out
    }

    pub fn write(&self) -> Result<PathBuf> {
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, self.to_tsv())?;
        Ok(path)
    }

    /// Reads a manifest given either the dataset directory or the TSV file itself.
    pub fn read(path: &Path) -> Result<PlayManifest> {
        let (dir, file) = if path.is_dir() {
            (path.to_path_buf(), path.join(MANIFEST_FILE))
        } else {
            (path.parent().map(Path::to_path_buf).unwrap_or_default(), path.to_path_buf())
        };
        let text = fs::read_to_string(&file)?;
        let entries = parse_tsv(&text)?;
        Ok(PlayManifest { dir, entries })
    }
}

fn parse_tsv(text: &str) -> Result<Vec<ManifestEntry>> {
    let bad = |line: usize, what: &str| Error::MismatchedInputs(format!("manifest line {line}: {what}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.split('\t').eq(MANIFEST_COLUMNS) => {}
        _ => return Err(bad(1, "unexpected header")),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let f: Vec<&str> = l.split('\t').collect();
            if f.len() != MANIFEST_COLUMNS.len() {
                return Err(bad(i + 1, "wrong column count"));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad(i + 1, "bad integer"));
            Ok(ManifestEntry {
                episode_id: num(f[0])?,
                seed: num(f[1])?,
                length: num(f[2])? as u32,
                unlocked: num(f[3])? as u32,
                survived: num(f[4])? != 0,
                score: f[5].parse().map_err(|_| bad(i + 1, "bad score"))?,
            })
        })
        .collect()
}
