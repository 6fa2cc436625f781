//! Procedural terrain and the static layer of the environment state.

mod gen;
mod grid;
mod noise;
mod tile;

pub use gen::{generate_world, stone_region_depth, SPAWN, MAX_ATTEMPTS};
pub use grid::{Direction, Plant, Pos, WorldGrid, MAP_SIZE, MAX_PLANTS};
pub use noise::ValueNoise;
pub use tile::TileKind;
