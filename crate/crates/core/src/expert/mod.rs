//! Scripted survival expert, shortest-path navigation and instruction chaining.

pub mod nav;
mod planner;
mod play;
mod policy;
mod rollout;
mod skills;

pub use planner::{follow_caption, heuristic_instruction_planner, instruction_for, ChainedAgent, TERMINAL_INSTRUCTION};
pub use play::{generate_play, PlayOptions, DEFAULT_MAX_STEPS};
pub use policy::{survival_policy, Expert, FoodSource, PlannerState, Subgoal, PRIORITY};
pub use rollout::{replay, rollout, rollout_episode, NoopPolicy, Policy, Trajectory, TrajectoryMeta};
