use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{crafter_score, mean_std, normalized_return, SuccessRates};
use crate::error::{Error, Result};
use crate::expert::{Expert, NoopPolicy, Policy};
use crate::mechanics::{Achievement, AchievementSet, Action, EnvConfig, EnvState};
use crate::render::{render, Frame};
use crate::seed::{Seed, Stream, StreamRng};

/// Episodes per chunk when reporting chunked statistics.
pub const CHUNK_EPISODES: usize = 20;
/// Chunked statistics are reported only for runs of exactly this many episodes.
pub const CHUNKED_RUN: usize = 100;

/// Uniformly random actions.
#[derive(Clone, Debug)]
pub struct RandomPolicy(StreamRng);

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy(Seed::new(seed, Stream::Episode).derive(u64::MAX).rng())
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, _: &EnvState) -> Action {
        Action::ALL[self.0.below(Action::ALL.len() as u32) as usize]
    }
}

/// Adapts a pixel agent to the symbolic interface by rendering each state.
pub struct PixelAgent<F>(pub F);

impl<F: FnMut(&Frame) -> Action> Policy for PixelAgent<F> {
    fn act(&mut self, state: &EnvState) -> Action {
        (self.0)(&render(state))
    }
}

/// Built-in agents selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinAgent {
    Expert,
    Noop,
    Random,
}

impl BuiltinAgent {
    pub const ALL: [BuiltinAgent; 3] = [BuiltinAgent::Expert, BuiltinAgent::Noop, BuiltinAgent::Random];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinAgent::Expert => "expert",
            BuiltinAgent::Noop => "noop",
            BuiltinAgent::Random => "random",
        }
    }

    pub fn from_name(name: &str) -> Option<BuiltinAgent> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn make(self, seed: u64) -> Box<dyn Policy + Send> {
        match self {
            BuiltinAgent::Expert => Box::new(Expert::new(seed)),
            BuiltinAgent::Noop => Box::new(NoopPolicy),
            BuiltinAgent::Random => Box::new(RandomPolicy::new(seed)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub seed: u64,
    pub length: u32,
    pub episode_return: f64,
    pub unlocked: AchievementSet,
    pub survived: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChunkStats {
    pub chunks: usize,
    pub score_mean: f64,
    pub score_std: f64,
    pub return_mean: f64,
    pub return_std: f64,
    pub rate_mean: SuccessRates,
    pub rate_std: SuccessRates,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub agent: String,
    pub n_episodes: usize,
    pub success_rates: SuccessRates,
    pub score: f64,
    /// Mean return in percent of the maximum.
    pub normalized_return: f64,
    pub mean_length: f64,
    pub survival_rate: f64,
    pub chunks: Option<ChunkStats>,
    pub episodes: Vec<EpisodeResult>,
}

fn run_episode(policy: &mut dyn Policy, seed: u64, config: &EnvConfig, max_steps: usize) -> Result<EpisodeResult> {
    let mut state = EnvState::reset(seed, config.clone())?;
    let mut total = 0i64;
    let mut steps = 0;
    while !state.done && steps < max_steps {
        let action = policy.act(&state);
        total += state.step(action)?.reward.tenths() as i64;
        steps += 1;
    }
    Ok(EpisodeResult {
        seed,
        length: steps as u32,
        episode_return: total as f64 / 10.0,
        unlocked: state.achievements,
        survived: state.player.health > 0,
    })
}

/// Runs one agent per seed `0..n_episodes` and aggregates the metrics.
pub fn run_benchmark<F>(
    agent_name: &str,
    make_agent: F,
    n_episodes: usize,
    config: &EnvConfig,
    max_steps: usize,
) -> Result<BenchmarkReport>
where
    F: Fn(u64) -> Box<dyn Policy + Send> + Sync,
{
    if n_episodes == 0 {
        return Err(Error::InvalidConfig("benchmark needs at least one episode".into()));
    }
    if max_steps == 0 {
        return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
    }
    config.validate()?;
    let episodes: Vec<EpisodeResult> = (0..n_episodes as u64)
        .into_par_iter()
        .map(|seed| {
            let mut agent = make_agent(seed);
            run_episode(agent.as_mut(), seed, config, max_steps).map_err(|e| e.in_episode(seed))
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkReport::from_episodes(agent_name, episodes))
}

fn rates_and_returns(eps: &[EpisodeResult]) -> (SuccessRates, Vec<f64>) {
    let unlocks: Vec<AchievementSet> = eps.iter().map(|e| e.unlocked).collect();
    (SuccessRates::from_unlocks(&unlocks), eps.iter().map(|e| e.episode_return).collect())
}

impl BenchmarkReport {
    pub fn from_episodes(agent: &str, episodes: Vec<EpisodeResult>) -> BenchmarkReport {
        let n = episodes.len();
        let (success_rates, returns) = rates_and_returns(&episodes);
        let chunks = (n == CHUNKED_RUN).then(|| {
            let per: Vec<(SuccessRates, f64)> = episodes
                .chunks(CHUNK_EPISODES)
                .map(|c| {
                    let (r, ret) = rates_and_returns(c);
                    (r, normalized_return(&ret))
                })
                .collect();
            let scores: Vec<f64> = per.iter().map(|(r, _)| crafter_score(r)).collect();
            let rets: Vec<f64> = per.iter().map(|(_, x)| *x).collect();
            let (score_mean, score_std) = mean_std(&scores);
            let (return_mean, return_std) = mean_std(&rets);
            let rate_stats = Achievement::ALL.map(|a| mean_std(&per.iter().map(|(r, _)| r.get(a)).collect::<Vec<_>>()));
            ChunkStats {
                chunks: per.len(),
                score_mean,
                score_std,
                return_mean,
                return_std,
                rate_mean: SuccessRates(rate_stats.map(|s| s.0)),
                rate_std: SuccessRates(rate_stats.map(|s| s.1)),
            }
        });
        BenchmarkReport {
            agent: agent.to_string(),
            n_episodes: n,
            score: crafter_score(&success_rates),
            normalized_return: normalized_return(&returns),
            mean_length: episodes.iter().map(|e| e.length as f64).sum::<f64>() / n.max(1) as f64,
            survival_rate: episodes.iter().filter(|e| e.survived).count() as f64 / n.max(1) as f64 * 100.0,
            success_rates,
            chunks,
            episodes,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "agent            {}", self.agent);
        let _ = writeln!(s, "episodes         {}", self.n_episodes);
        let _ = writeln!(s, "score            {:.2}", self.score);
        let _ = writeln!(s, "return           {:.2}%", self.normalized_return);
        let _ = writeln!(s, "mean length      {:.1}", self.mean_length);
        let _ = writeln!(s, "survival         {:.1}%", self.survival_rate);
        if let Some(c) = &self.chunks {
            let _ = writeln!(s, "chunked score    {:.2} ± {:.2} over {} chunks", c.score_mean, c.score_std, c.chunks);
            let _ = writeln!(s, "chunked return   {:.2} ± {:.2}%", c.return_mean, c.return_std);
        }
        let _ = writeln!(s, "\nsuccess rates");
        for (a, r) in self.success_rates.iter() {
            match &self.chunks {
                Some(c) => {
                    let _ = writeln!(s, "  {:<22} {:6.1}%  ± {:.1}", a.name(), r, c.rate_std.get(a));
                }
                None => {
                    let _ = writeln!(s, "  {:<22} {:6.1}%", a.name(), r);
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-achievement rates for plotting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("achievement,success_rate,chunk_mean,chunk_std\n");
        for (a, r) in self.success_rates.iter() {
            match &self.chunks {
                Some(c) => {
                    let _ = writeln!(s, "{},{:.4},{:.4},{:.4}", a.name(), r, c.rate_mean.get(a), c.rate_std.get(a));
                }
                None => {
                    let _ = writeln!(s, "{},{:.4},,", a.name(), r);
                }
            }
        }
        s
    }

    /// Writes `<stem>.txt`, `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        [("txt", self.to_text()), ("json", self.to_json()), ("csv", self.to_csv())]
            .into_iter()
            .map(|(ext, body)| {
                let path = dir.join(format!("{stem}.{ext}"));
                std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}
