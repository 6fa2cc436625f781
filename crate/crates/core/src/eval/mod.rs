//! Crafter Score, normalized return, the benchmark runner, the sequenced task suite
//! and classifier-free guidance logits.

mod benchmark;
mod metrics;
mod speed;
mod tasks;

pub use benchmark::{
    run_benchmark, BenchmarkReport, BuiltinAgent, ChunkStats, EpisodeResult, PixelAgent, RandomPolicy, CHUNKED_RUN,
    CHUNK_EPISODES,
};
pub use metrics::{cfg_combine, crafter_score, mean_std, normalized_return, SuccessRates, MAX_RETURN};
pub use speed::{measure_throughput, Throughput};
pub use tasks::{
    make_task_env, ordered_prefix, run_task_episode, TaskEnv, TaskOutcome, TaskSpec, TaskStep, TASK_IDS, TASK_STEP_LIMIT,
};
