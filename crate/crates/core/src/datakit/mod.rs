//! Episode containers, noop filtering and goal relabeling.

mod container;
mod filter;
mod manifest;
mod relabel;

pub use container::{
    array_names, inspect_episode, parse_header, read_episode, write_arrays, write_episode, Array, ArrayData,
    ArrayInfo, ContainerHeader, DType, EpisodeArrays, MAGIC, SCHEMA_VERSION,
};
pub use filter::{noop_filter, KeepMask, DEFAULT_NOOP_THRESHOLD};
pub use manifest::{container_name, ManifestEntry, PlayManifest, MANIFEST_FILE};
pub use relabel::{
    event_relabel, export_goal_dataset, read_goal_dataset, relabel_masked, segment_events, EventSegment,
    GoalDatasetSummary, GoalEpisode, GoalRef, RelabelConfig, RelabeledChunk, GOAL_FRAMES,
};
