use std::collections::BTreeMap;
use std::path::Path;

use super::vocab::is_caption;
use crate::error::{Error, Result};
use crate::seed::{Seed, Stream, StreamRng};

/// Base caption to its ordered paraphrase variants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParaphraseTable {
    entries: BTreeMap<String, Vec<String>>,
}

/// Maps wording used in paraphrase files onto vocabulary wording.
fn normalize(key: &str) -> String {
    key.trim().to_lowercase().replace("crafting table", "table")
}

impl ParaphraseTable {
    /// Parses a YAML mapping of caption to a list of variants.
    pub fn from_yaml(text: &str) -> Result<ParaphraseTable> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_yaml::from_str(text).map_err(|e| Error::MalformedTable(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (key, variants) in raw {
            let base = normalize(&key);
            if !is_caption(&base) {
                return Err(Error::UnknownCaption(key));
            }
            if variants.is_empty() {
                return Err(Error::MalformedTable(format!("{key:?} has no variants")));
            }
            if entries.insert(base, variants).is_some() {
                return Err(Error::MalformedTable(format!("{key:?} appears twice")));
            }
        }
        Ok(ParaphraseTable { entries })
    }

    pub fn variants(&self, base: &str) -> Option<&[String]> {
        self.entries.get(&normalize(base)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The original plus up to `n_cap - 1` variants.
    pub fn options<'a>(&'a self, base: &'a str, n_cap: usize) -> Result<Vec<&'a str>> {
        if !is_caption(base) {
            return Err(Error::UnknownCaption(base.to_string()));
        }
        let mut out = vec![base];
        if let Some(v) = self.entries.get(base) {
            out.extend(v.iter().take(n_cap.saturating_sub(1)).map(String::as_str));
        }
        Ok(out)
    }
}

pub fn load_paraphrases(path: &Path) -> Result<ParaphraseTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ParaphraseTable::from_yaml(&text)
}

/// Draws uniformly over a caption and its first variants.
#[derive(Clone, Debug)]
pub struct ParaphraseSampler {
    rng: StreamRng,
}

impl ParaphraseSampler {
    pub fn new(seed: u64) -> Self {
        ParaphraseSampler { rng: Seed::new(seed, Stream::Paraphrase).rng() }
    }

    pub fn sample(&mut self, table: &ParaphraseTable, base: &str, n_cap: usize) -> Result<String> {
        let options = table.options(base, n_cap.max(1))?;
        let i = self.rng.below(options.len() as u32) as usize;
        Ok(options[i].to_string())
    }
}

/// Single draw for `(base, seed)`.
pub fn sample_caption(table: &ParaphraseTable, base: &str, n_cap: usize, seed: u64) -> Result<String> {
    ParaphraseSampler::new(seed).sample(table, base, n_cap)
}
