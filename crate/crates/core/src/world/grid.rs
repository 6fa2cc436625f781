use serde::{Deserialize, Serialize};

use super::TileKind;
use crate::error::{Error, Result};

pub const MAP_SIZE: i32 = 64;
pub const MAX_PLANTS: usize = 10;

/// Grid coordinates: `x` grows east, `y` grows south.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    #[inline]
    pub const fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    #[inline]
    pub fn step(self, dir: Direction) -> Pos {
        let (dx, dy) = dir.delta();
        Pos::new(self.x + dx, self.y + dy)
    }

    #[inline]
    pub fn offset(self, dx: i32, dy: i32) -> Pos {
        Pos::new(self.x + dx, self.y + dy)
    }

    #[inline]
    pub fn in_bounds(self) -> bool {
        (0..MAP_SIZE).contains(&self.x) && (0..MAP_SIZE).contains(&self.y)
    }

    #[inline]
    pub fn manhattan(self, other: Pos) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    #[inline]
    pub fn chebyshev(self, other: Pos) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn neighbors(self) -> impl Iterator<Item = Pos> {
        Direction::ALL.into_iter().map(move |d| self.step(d))
    }
}

/// The four compass directions, in action order (left, right, up, down).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum Direction {
    Left = 0,
    Right = 1,
    Up = 2,
    Down = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Left,
        Direction::Right,
        Direction::Up,
        Direction::Down,
    ];

    #[inline]
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
            Direction::Up => (0, -1),
            Direction::Down => (0, 1),
        }
    }

    pub fn from_delta(dx: i32, dy: i32) -> Option<Direction> {
        match (dx, dy) {
            (-1, 0) => Some(Direction::Left),
            (1, 0) => Some(Direction::Right),
            (0, -1) => Some(Direction::Up),
            (0, 1) => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn from_u8(v: u8) -> Option<Direction> {
        Direction::ALL.get(v as usize).copied()
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    /// Compass name used in captions.
    pub fn compass(self) -> &'static str {
        match self {
            Direction::Left => "west",
            Direction::Right => "east",
            Direction::Up => "north",
            Direction::Down => "south",
        }
    }
}

/// A growing sapling occupying a [`TileKind::Plant`] cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plant {
    pub pos: Pos,
    /// Steps since planting or since last eaten.
    pub grown: u32,
    pub health: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldGrid {
    #[serde(with = "tile_bytes")]
    tiles: Vec<TileKind>,
    pub plants: [Option<Plant>; MAX_PLANTS],
    pub spawn_point: Pos,
}

impl WorldGrid {
    /// A map filled with one material.
    pub fn filled(kind: TileKind, spawn_point: Pos) -> Self {
        WorldGrid {
            tiles: vec![kind; (MAP_SIZE * MAP_SIZE) as usize],
            plants: [None; MAX_PLANTS],
            spawn_point,
        }
    }

    pub fn from_tiles(tiles: Vec<TileKind>, spawn_point: Pos) -> Result<Self> {
        if tiles.len() != (MAP_SIZE * MAP_SIZE) as usize {
            return Err(Error::InvalidConfig(format!(
                "grid needs {} tiles, got {}",
                MAP_SIZE * MAP_SIZE,
                tiles.len()
            )));
        }
        Ok(WorldGrid {
            tiles,
            plants: [None; MAX_PLANTS],
            spawn_point,
        })
    }

    #[inline]
    fn index(pos: Pos) -> usize {
        (pos.y * MAP_SIZE + pos.x) as usize
    }

    /// Checked lookup.
    pub fn tile_at(&self, pos: Pos) -> Result<TileKind> {
        self.get(pos).ok_or(Error::OutOfBounds { x: pos.x, y: pos.y })
    }

    #[inline]
    pub fn get(&self, pos: Pos) -> Option<TileKind> {
        pos.in_bounds().then(|| self.tiles[Self::index(pos)])
    }

    /// Panics when `pos` is outside the map.
    #[inline]
    pub fn set(&mut self, pos: Pos, kind: TileKind) {
        assert!(pos.in_bounds(), "set outside map at {pos:?}");
        self.tiles[Self::index(pos)] = kind;
    }

    pub fn tiles(&self) -> &[TileKind] {
        &self.tiles
    }

    pub fn plant_at(&self, pos: Pos) -> Option<(usize, &Plant)> {
        self.plants
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.as_ref().filter(|p| p.pos == pos).map(|p| (i, p)))
    }

    pub fn plant_count(&self) -> usize {
        self.plants.iter().flatten().count()
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.tiles.iter().filter(|&&t| t == kind).count()
    }

    pub fn positions() -> impl Iterator<Item = Pos> {
        (0..MAP_SIZE).flat_map(|y| (0..MAP_SIZE).map(move |x| Pos::new(x, y)))
    }

    /// One byte per cell, row-major.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.tiles.iter().map(|&t| t as u8).collect()
    }
}

mod tile_bytes {
    use super::TileKind;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(tiles: &[TileKind], s: S) -> Result<S::Ok, S::Error> {
        let bytes: Vec<u8> = tiles.iter().map(|&t| t as u8).collect();
        s.serialize_bytes(&bytes)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<TileKind>, D::Error> {
        let bytes = Vec::<u8>::deserialize(d)?;
        bytes
            .into_iter()
            .map(|b| TileKind::from_u8(b).ok_or_else(|| D::Error::custom(format!("bad tile {b}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_bounds_lookup() {
        let grid = WorldGrid::filled(TileKind::Grass, Pos::new(32, 32));
        assert!(matches!(
            grid.tile_at(Pos::new(64, 0)),
            Err(Error::OutOfBounds { x: 64, y: 0 })
        ));
        assert!(matches!(grid.tile_at(Pos::new(0, -1)), Err(Error::OutOfBounds { .. })));
        assert_eq!(grid.tile_at(Pos::new(63, 63)).unwrap(), TileKind::Grass);
    }

    #[test]
    fn direction_round_trip() {
        for d in Direction::ALL {
            let (dx, dy) = d.delta();
            assert_eq!(Direction::from_delta(dx, dy), Some(d));
            assert_eq!(d.opposite().opposite(), d);
        }
    }
}
