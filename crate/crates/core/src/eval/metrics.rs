use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanics::{Achievement, AchievementSet};

/// Maximum episode return: one point per achievement.
pub const MAX_RETURN: f64 = Achievement::COUNT as f64;

/// Per-achievement success percentages in canonical achievement order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessRates(pub [f64; Achievement::COUNT]);

impl SuccessRates {
    pub fn new(rates: [f64; Achievement::COUNT]) -> Result<SuccessRates> {
        if let Some(r) = rates.iter().find(|r| !(0.0..=100.0).contains(*r)) {
            return Err(Error::InvalidConfig(format!("success rate {r} outside [0, 100]")));
        }
        Ok(SuccessRates(rates))
    }

    /// Share of episodes unlocking each achievement, in percent.
    pub fn from_unlocks(unlocks: &[AchievementSet]) -> SuccessRates {
        let n = unlocks.len().max(1) as f64;
        SuccessRates(Achievement::ALL.map(|a| unlocks.iter().filter(|u| u.contains(a)).count() as f64 / n * 100.0))
    }

    pub fn get(&self, a: Achievement) -> f64 {
        self.0[a.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Achievement, f64)> + '_ {
        Achievement::ALL.into_iter().zip(self.0)
    }
}

/// Geometric mean of `1 + s_i` minus one.
///
/// Logs are taken relative to the largest term, so equal rates come back exactly.
pub fn crafter_score(rates: &SuccessRates) -> f64 {
    let top = rates.0.iter().fold(0.0f64, |m, &s| m.max(s)) + 1.0;
    let mean_log = rates.0.iter().map(|s| ((1.0 + s) / top).ln()).sum::<f64>() / Achievement::COUNT as f64;
    top * mean_log.exp() - 1.0
}

/// Mean episode return as a percentage of [`MAX_RETURN`]. Empty input gives 0.
pub fn normalized_return(episode_returns: &[f64]) -> f64 {
    if episode_returns.is_empty() {
        return 0.0;
    }
    let mean = episode_returns.iter().sum::<f64>() / episode_returns.len() as f64;
    mean / MAX_RETURN * 100.0
}

/// `(1 + scale) * cond - scale * uncond`, elementwise.
pub fn cfg_combine(cond: &[f64], uncond: &[f64], scale: f64) -> Result<Vec<f64>> {
    if cond.len() != uncond.len() {
        return Err(Error::LengthMismatch { cond: cond.len(), uncond: uncond.len() });
    }
    Ok(cond.iter().zip(uncond).map(|(c, u)| (1.0 + scale) * c - scale * u).collect())
}

/// Population mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
