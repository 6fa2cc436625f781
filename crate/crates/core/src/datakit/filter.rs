use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanics::Action;

pub const DEFAULT_NOOP_THRESHOLD: usize = 20;

/// Per-step keep flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeepMask(pub Vec<bool>);

impl KeepMask {
    pub fn all(len: usize) -> Self {
        KeepMask(vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn kept(&self) -> usize {
        self.0.iter().filter(|&&k| k).count()
    }

    /// Original indices of kept steps, in order.
    pub fn kept_indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| i).collect()
    }

    /// Maximal runs of kept steps as inclusive `(start, end)` pairs.
    pub fn kept_runs(&self) -> Vec<(usize, usize)> {
        runs(&self.0).filter(|&(_, _, k)| k).map(|(a, b, _)| (a, b)).collect()
    }
}

/// Maximal runs of equal values as `(start, end, value)`.
fn runs<T: PartialEq + Copy>(xs: &[T]) -> impl Iterator<Item = (usize, usize, T)> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        let v = *xs.get(i)?;
        let start = i;
        while xs.get(i) == Some(&v) {
            i += 1;
        }
        Some((start, i - 1, v))
    })
}

/// Drops every maximal noop run shorter than `threshold`; longer runs stay whole.
pub fn noop_filter(actions: &[Action], threshold: usize) -> Result<KeepMask> {
    if threshold == 0 {
        return Err(Error::InvalidConfig("noop threshold must be at least 1".into()));
    }
    let is_noop: Vec<bool> = actions.iter().map(|&a| a == Action::Noop).collect();
    let mut mask = vec![true; actions.len()];
    for (a, b, noop) in runs(&is_noop) {
        if noop && b - a + 1 < threshold {
            mask[a..=b].fill(false);
        }
    }
    Ok(KeepMask(mask))
}
