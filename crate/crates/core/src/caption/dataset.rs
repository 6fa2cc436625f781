use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::detect::{detect_events, CaptionRecord};
use super::paraphrase::{ParaphraseSampler, ParaphraseTable};
use super::vocab::Category;
use crate::datakit::{read_episode, PlayManifest};
use crate::error::{Error, Result};
use crate::seed::{Seed, Stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptionDatasetOptions {
    /// Subsample every category down to the rarest non-empty one.
    pub balance: bool,
    pub seed: u64,
    /// Paraphrase options per caption, counting the original.
    pub variants_cap: usize,
}

impl Default for CaptionDatasetOptions {
    fn default() -> Self {
        CaptionDatasetOptions { balance: false, seed: 0, variants_cap: usize::MAX }
    }
}

/// A caption record plus an optional paraphrased rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionLine {
    #[serde(flatten)]
    pub record: CaptionRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paraphrase: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CaptionDatasetSummary {
    pub episodes: usize,
    /// Records detected before balancing.
    pub detected: usize,
    pub written: usize,
    pub per_category: BTreeMap<Category, usize>,
    pub per_rule: BTreeMap<String, usize>,
}

/// Detects events over every episode of a play dataset and writes one JSON record per line.
pub fn generate_caption_dataset(
    play_manifest: &Path,
    out_path: &Path,
    paraphrases: Option<&ParaphraseTable>,
    opts: &CaptionDatasetOptions,
) -> Result<CaptionDatasetSummary> {
    let manifest = PlayManifest::read(play_manifest)?;
    let per_episode: Vec<Vec<CaptionRecord>> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let traj = read_episode(&manifest.container_path(e.episode_id))
                .and_then(|a| a.to_trajectory())
                .map_err(|err| err.in_episode(e.episode_id))?;
            Ok(detect_events(&traj))
        })
        .collect::<Result<_>>()?;
    let records: Vec<CaptionRecord> = per_episode.into_iter().flatten().collect();
    let detected = records.len();
    let records = if opts.balance { balance(records, opts.seed) } else { records };

    let mut summary = CaptionDatasetSummary { episodes: manifest.entries.len(), detected, ..Default::default() };
    let mut sampler = ParaphraseSampler::new(opts.seed);
    let mut w = BufWriter::new(fs::File::create(out_path).map_err(|e| Error::io(out_path, e))?);
    for record in records {
        let paraphrase = match paraphrases {
            Some(table) => Some(sampler.sample(table, &record.caption, opts.variants_cap)?),
            None => None,
        };
        *summary.per_category.entry(record.category).or_default() += 1;
        *summary.per_rule.entry(record.rule().name().to_string()).or_default() += 1;
        summary.written += 1;
        serde_json::to_writer(&mut w, &CaptionLine { record, paraphrase }).map_err(|e| Error::Io(e.into()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(summary)
}

/// Keeps a seeded uniform subset of each category, sized to the rarest present category.
fn balance(records: Vec<CaptionRecord>, seed: u64) -> Vec<CaptionRecord> {
    let mut by_cat: BTreeMap<Category, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_cat.entry(r.category).or_default().push(i);
    }
    let Some(target) = by_cat.values().map(Vec::len).min() else {
        return records;
    };
    let mut rng = Seed::new(seed, Stream::Paraphrase).derive(u64::MAX).rng();
    let mut keep = vec![false; records.len()];
    for idx in by_cat.values_mut() {
        for k in 0..target {
            let j = k + rng.below((idx.len() - k) as u32) as usize;
            idx.swap(k, j);
            keep[idx[k]] = true;
        }
    }
    records.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect()
}

pub fn read_caption_dataset(path: &Path) -> Result<Vec<CaptionLine>> {
    let reader = BufReader::new(fs::File::open(path).map_err(|e| Error::io(path, e))?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| Error::MismatchedInputs(format!("caption dataset line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Records only, dropping paraphrases.
pub fn read_caption_records(path: &Path) -> Result<Vec<CaptionRecord>> {
    Ok(read_caption_dataset(path)?.into_iter().map(|l| l.record).collect())
}
