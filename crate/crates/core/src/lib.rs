//! A deterministic Crafter-compatible environment and the dataset tooling
//! around it: scripted expert demonstrations, rule-based captioning, noop
//! filtering, event-based packed hindsight relabeling, benchmark metrics and
//! a length-prefixed JSON bridge for external agents.
//!
//! The modules mirror the pipeline:
//!
//! - [`world`]: procedural 64×64 terrain.
//! - [`mechanics`]: actions, survival stats, crafting, mobs, rewards.
//! - [`render`]: 144×144 RGB observations and PNG/GIF export.
//! - [`expert`]: scripted survival expert, instruction planner and rollouts.
//! - [`caption`]: the 15 caption rules, vocabulary and paraphrase tables.
//! - [`datakit`]: episode containers, noop filtering and goal relabeling.
//! - [`eval`]: Crafter Score, normalized return, benchmark and task suites.
//! - [`bridge`]: wire protocol server.

pub mod bridge;
pub mod caption;
pub mod datakit;
pub mod error;
pub mod eval;
pub mod expert;
pub mod mechanics;
pub mod render;
pub mod seed;
pub mod world;

pub use error::{Error, Result};
pub use mechanics::{
    Achievement, AchievementSet, Action, EnvConfig, EnvState, Item, Reward, StepResult,
};
pub use seed::{Seed, Stream};
pub use world::{Pos, TileKind, WorldGrid};
