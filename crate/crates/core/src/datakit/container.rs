//! The CDJ1 episode container.
//!
//! Layout: `b"CDJ1"`, a little-endian `u32` header length, a UTF-8 JSON
//! header, then every array packed back to back in little-endian order.
//! Array offsets in the header are relative to the end of the header.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expert::{replay, Trajectory, TrajectoryMeta};
use crate::mechanics::{Achievement, Action, EnvState, Item, Mob, MobKind};
use crate::render::{Frame, FRAME_HEIGHT, FRAME_WIDTH};
use crate::world::MAP_SIZE;

pub const MAGIC: &[u8; 4] = b"CDJ1";
pub const SCHEMA_VERSION: u32 = 1;

const PLANT_SLOTS: usize = 10;
const MAP: usize = MAP_SIZE as usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    U8,
    I32,
    F32,
}

impl DType {
    pub fn size(self) -> usize {
        match self {
            DType::U8 => 1,
            DType::I32 | DType::F32 => 4,
        }
    }
}

/// Whether an array has one row per state (`L + 1`) or per action (`L`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rows {
    States,
    Actions,
}

/// Every array in file order: name, per-row shape, element type, row count.
const LAYOUT: [(&str, &[usize], DType, Rows); 23] = [
    ("rgb", &[3, FRAME_HEIGHT, FRAME_WIDTH], DType::U8, Rows::States),
    ("action", &[], DType::U8, Rows::Actions),
    ("map", &[MAP, MAP], DType::U8, Rows::States),
    ("light_level", &[], DType::F32, Rows::States),
    ("plant_position", &[PLANT_SLOTS, 2], DType::I32, Rows::States),
    ("plant_status", &[PLANT_SLOTS, 2], DType::I32, Rows::States),
    ("player_position", &[2], DType::I32, Rows::States),
    ("player_direction", &[], DType::U8, Rows::States),
    ("player_vitals", &[4], DType::I32, Rows::States),
    ("player_counters", &[4], DType::F32, Rows::States),
    ("player_sleeping", &[], DType::U8, Rows::States),
    ("player_inventory", &[Item::COUNT], DType::U8, Rows::States),
    ("player_achievements", &[Achievement::COUNT], DType::U8, Rows::States),
    ("mob_map", &[MAP, MAP], DType::U8, Rows::States),
    ("cow_position", &[4, 2], DType::I32, Rows::States),
    ("cow_status", &[4, 3], DType::I32, Rows::States),
    ("zombie_position", &[4, 2], DType::I32, Rows::States),
    ("zombie_status", &[4, 3], DType::I32, Rows::States),
    ("skeleton_position", &[2, 2], DType::I32, Rows::States),
    ("skeleton_status", &[2, 3], DType::I32, Rows::States),
    ("arrow_position", &[4, 2], DType::I32, Rows::States),
    ("arrow_status", &[4, 3], DType::I32, Rows::States),
    ("arrow_direction", &[4, 2], DType::I32, Rows::States),
];

fn layout() -> impl Iterator<Item = (&'static str, &'static [usize], DType, Rows)> {
    LAYOUT.into_iter()
}

/// Array names in file order.
pub fn array_names() -> Vec<&'static str> {
    layout().map(|(n, ..)| n).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayInfo {
    pub name: String,
    pub shape: Vec<usize>,
    pub dtype: DType,
    pub offset: u64,
    pub nbytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainerHeader {
    pub schema_version: u32,
    pub meta: TrajectoryMeta,
    /// Episode length `L` (number of actions).
    pub length: usize,
    pub arrays: Vec<ArrayInfo>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArrayData {
    U8(Vec<u8>),
    I32(Vec<i32>),
    F32(Vec<f32>),
}

impl ArrayData {
    pub fn dtype(&self) -> DType {
        match self {
            ArrayData::U8(_) => DType::U8,
            ArrayData::I32(_) => DType::I32,
            ArrayData::F32(_) => DType::F32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ArrayData::U8(v) => v.len(),
            ArrayData::I32(v) => v.len(),
            ArrayData::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn write_le(&self, out: &mut Vec<u8>) {
        match self {
            ArrayData::U8(v) => out.extend_from_slice(v),
            ArrayData::I32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            ArrayData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
    }

    fn read_le(dtype: DType, bytes: &[u8]) -> ArrayData {
        let words = || bytes.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]);
        match dtype {
            DType::U8 => ArrayData::U8(bytes.to_vec()),
            DType::I32 => ArrayData::I32(words().map(i32::from_le_bytes).collect()),
            DType::F32 => ArrayData::F32(words().map(f32::from_le_bytes).collect()),
        }
    }
}

/// A named, shaped array.
#[derive(Clone, Debug, PartialEq)]
pub struct Array {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: ArrayData,
}

/// One episode in array form: exactly what a container holds.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeArrays {
    pub meta: TrajectoryMeta,
    pub length: usize,
    pub arrays: Vec<Array>,
}

fn mob_slots(s: &EnvState, kind: MobKind, f: impl Fn(Option<&Mob>) -> [i32; 3], width: usize) -> Vec<i32> {
    s.mobs.slots(kind).iter().flat_map(|m| f(m.as_ref()).into_iter().take(width)).collect()
}

fn mob_kind(name: &str) -> MobKind {
    let prefix = name.split('_').next().unwrap_or_default();
    MobKind::from_name(prefix).expect("mob array names start with a mob kind")
}

/// One row of array `name` for a single state.
fn state_row(s: &EnvState, name: &str) -> ArrayData {
    let p = &s.player;
    match name {
        "map" => ArrayData::U8(s.grid.tiles().iter().map(|&k| k as u8).collect()),
        "light_level" => ArrayData::F32(vec![s.light_level]),
        "plant_position" => ArrayData::I32(
            s.grid.plants.iter().flat_map(|pl| pl.map_or([-1, -1], |pl| [pl.pos.x, pl.pos.y])).collect(),
        ),
        "plant_status" => ArrayData::I32(
            s.grid.plants.iter().flat_map(|pl| pl.map_or([0, 0], |pl| [pl.health, pl.grown as i32])).collect(),
        ),
        "player_position" => ArrayData::I32(vec![p.pos.x, p.pos.y]),
        "player_direction" => ArrayData::U8(vec![p.facing as u8]),
        "player_vitals" => ArrayData::I32(p.vitals().to_vec()),
        "player_counters" => ArrayData::F32(p.counters().to_vec()),
        "player_sleeping" => ArrayData::U8(vec![p.sleeping as u8]),
        "player_inventory" => ArrayData::U8(p.inventory.to_vec()),
        "player_achievements" => ArrayData::U8(s.achievements.to_flags().map(u8::from).to_vec()),
        "mob_map" => ArrayData::U8(s.mob_map()),
        n if n.ends_with("_position") => {
            ArrayData::I32(mob_slots(s, mob_kind(n), |m| m.map_or([-1, -1, 0], |m| [m.pos.x, m.pos.y, 0]), 2))
        }
        n if n.ends_with("_status") => {
            ArrayData::I32(mob_slots(s, mob_kind(n), |m| m.map_or([0, 0, 0], |m| [1, m.health, m.cooldown]), 3))
        }
        "arrow_direction" => ArrayData::I32(mob_slots(
            s,
            MobKind::Arrow,
            |m| m.map_or([0, 0, 0], |m| {
                let (dx, dy) = m.facing.delta();
                [dx, dy, 0]
            }),
            2,
        )),
        other => unreachable!("no state column {other}"),
    }
}

impl ArrayData {
    fn extend(&mut self, other: ArrayData) {
        match (self, other) {
            (ArrayData::U8(a), ArrayData::U8(b)) => a.extend(b),
            (ArrayData::I32(a), ArrayData::I32(b)) => a.extend(b),
            (ArrayData::F32(a), ArrayData::F32(b)) => a.extend(b),
            _ => unreachable!("column types are fixed by the layout"),
        }
    }

    fn empty(dtype: DType) -> ArrayData {
        match dtype {
            DType::U8 => ArrayData::U8(Vec::new()),
            DType::I32 => ArrayData::I32(Vec::new()),
            DType::F32 => ArrayData::F32(Vec::new()),
        }
    }
}

impl EpisodeArrays {
    /// Flattens a trajectory. RGB is included only when frames were recorded.
    pub fn from_trajectory(t: &Trajectory) -> EpisodeArrays {
        let mut arrays = Vec::new();
        for (name, row, dtype, rows) in layout() {
            let data = match name {
                "rgb" => match &t.frames {
                    Some(frames) => ArrayData::U8(frames.iter().flat_map(|f| f.to_chw()).collect()),
                    None => continue,
                },
                "action" => ArrayData::U8(t.actions.iter().map(|a| a.index() as u8).collect()),
                _ => t.states.iter().fold(ArrayData::empty(dtype), |mut acc, s| {
                    acc.extend(state_row(s, name));
                    acc
                }),
            };
            let count = if rows == Rows::States { t.states.len() } else { t.actions.len() };
            let shape = std::iter::once(count).chain(row.iter().copied()).collect();
            arrays.push(Array { name: name.to_string(), shape, data });
        }
        EpisodeArrays { meta: t.meta.clone(), length: t.actions.len(), arrays }
    }

    pub fn get(&self, name: &str) -> Option<&Array> {
        self.arrays.iter().find(|a| a.name == name)
    }

    pub fn u8s(&self, name: &str) -> Option<&[u8]> {
        match &self.get(name)?.data {
            ArrayData::U8(v) => Some(v),
            _ => None,
        }
    }

    pub fn i32s(&self, name: &str) -> Option<&[i32]> {
        match &self.get(name)?.data {
            ArrayData::I32(v) => Some(v),
            _ => None,
        }
    }

    pub fn f32s(&self, name: &str) -> Option<&[f32]> {
        match &self.get(name)?.data {
            ArrayData::F32(v) => Some(v),
            _ => None,
        }
    }

    pub fn has_frames(&self) -> bool {
        self.get("rgb").is_some()
    }

    pub fn actions(&self) -> Result<Vec<Action>> {
        let raw = self.u8s("action").ok_or_else(|| Error::MalformedContainer("missing action array".into()))?;
        raw.iter()
            .map(|&a| Action::from_index(a as usize).ok_or_else(|| Error::MalformedContainer(format!("bad action {a}"))))
            .collect()
    }

    /// Frame `i` in row-major RGB, when frames were stored.
    pub fn frame(&self, i: usize) -> Option<Frame> {
        let rgb = self.u8s("rgb")?;
        let size = 3 * FRAME_HEIGHT * FRAME_WIDTH;
        rgb.get(i * size..(i + 1) * size).and_then(Frame::from_chw)
    }

    /// Regenerates the full trajectory from seed and actions and checks it against the stored arrays.
    pub fn to_trajectory(&self) -> Result<Trajectory> {
        let m = &self.meta;
        let t = replay(m.episode_id, m.seed, m.config.clone(), &self.actions()?, self.has_frames())?;
        if EpisodeArrays::from_trajectory(&t) != *self {
            return Err(Error::MismatchedInputs(format!(
                "episode {} does not replay to its stored arrays",
                m.episode_id
            )));
        }
        Ok(t)
    }

    pub fn header(&self) -> ContainerHeader {
        let mut offset = 0u64;
        let arrays = self
            .arrays
            .iter()
            .map(|a| {
                let nbytes = (a.data.len() * a.data.dtype().size()) as u64;
                let info = ArrayInfo { name: a.name.clone(), shape: a.shape.clone(), dtype: a.data.dtype(), offset, nbytes };
                offset += nbytes;
                info
            })
            .collect();
        ContainerHeader { schema_version: SCHEMA_VERSION, meta: self.meta.clone(), length: self.length, arrays }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header()).expect("header serializes");
        let mut out = Vec::with_capacity(8 + header.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for a in &self.arrays {
            a.data.write_le(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<EpisodeArrays> {
        let header = parse_header(bytes)?;
        let payload = &bytes[8 + header_len(bytes)?..];
        let arrays = header
            .arrays
            .iter()
            .map(|info| {
                let (start, end) = (info.offset as usize, (info.offset + info.nbytes) as usize);
                Array { name: info.name.clone(), shape: info.shape.clone(), data: ArrayData::read_le(info.dtype, &payload[start..end]) }
            })
            .collect();
        Ok(EpisodeArrays { meta: header.meta, length: header.length, arrays })
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedContainer(msg.into())
}

fn header_len(bytes: &[u8]) -> Result<usize> {
    if bytes.len() < 8 {
        return Err(malformed("file shorter than the fixed preamble"));
    }
    if &bytes[..4] != MAGIC {
        return Err(malformed("bad magic"));
    }
    let len = u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]) as usize;
    if len > bytes.len() - 8 {
        return Err(malformed("header runs past end of file"));
    }
    Ok(len)
}

/// Parses and validates the header against the payload size and the array table.
pub fn parse_header(bytes: &[u8]) -> Result<ContainerHeader> {
    let len = header_len(bytes)?;
    let header: ContainerHeader =
        serde_json::from_slice(&bytes[8..8 + len]).map_err(|e| malformed(format!("header: {e}")))?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(malformed(format!("unsupported schema version {}", header.schema_version)));
    }
    let payload = (bytes.len() - 8 - len) as u64;
    let mut expected = layout().filter(|(name, ..)| *name != "rgb" || header.arrays.first().is_some_and(|a| a.name == "rgb"));
    let mut offset = 0u64;
    for info in &header.arrays {
        let Some((name, row, dtype, rows)) = expected.next() else {
            return Err(malformed(format!("unexpected array {:?}", info.name)));
        };
        if info.name != name || info.dtype != dtype {
            return Err(malformed(format!("expected {name} ({dtype:?}), found {} ({:?})", info.name, info.dtype)));
        }
        let count = if rows == Rows::States { header.length + 1 } else { header.length };
        let shape: Vec<usize> = std::iter::once(count).chain(row.iter().copied()).collect();
        if info.shape != shape {
            return Err(malformed(format!("{name}: shape {:?}, expected {shape:?}", info.shape)));
        }
        let nbytes = shape.iter().product::<usize>() as u64 * dtype.size() as u64;
        if info.nbytes != nbytes || info.offset != offset {
            return Err(malformed(format!("{name}: byte range does not match its shape")));
        }
        offset += nbytes;
    }
    if expected.next().is_some() {
        return Err(malformed("missing arrays"));
    }
    if offset != payload {
        return Err(malformed(format!("payload is {payload} bytes, header describes {offset}")));
    }
    Ok(header)
}

pub fn write_episode(trajectory: &Trajectory, path: &Path) -> Result<()> {
    write_arrays(&EpisodeArrays::from_trajectory(trajectory), path)
}

pub fn write_arrays(arrays: &EpisodeArrays, path: &Path) -> Result<()> {
    fs::write(path, arrays.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_episode(path: &Path) -> Result<EpisodeArrays> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    EpisodeArrays::from_bytes(&bytes)
}

/// Reads only the header.
pub fn inspect_episode(path: &Path) -> Result<ContainerHeader> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_header(&bytes)
}
