//! Pixel observations: a 9×7 tile viewport over a two-row inventory panel.

mod export;
mod sprites;

pub use export::{decode_png, export_gif, save_png};
pub use sprites::{sprite, Sprite, SpriteKey, Stat, TILE};

use crate::mechanics::{mechanics, EnvState, Item, MobKind};
use crate::world::{Pos, TileKind};

pub const FRAME_WIDTH: usize = 144;
pub const FRAME_HEIGHT: usize = 144;
pub const FRAME_BYTES: usize = FRAME_WIDTH * FRAME_HEIGHT * 3;
pub const VIEW_COLS: i32 = 9;
pub const VIEW_ROWS: i32 = 7;
pub const PANEL_TOP: usize = VIEW_ROWS as usize * TILE;
pub const PANEL_COLS: usize = 9;

/// One RGB observation, row-major, 3 bytes per pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    data: Vec<u8>,
}

impl Frame {
    pub fn blank() -> Frame {
        Frame { data: vec![0; FRAME_BYTES] }
    }

    pub fn from_bytes(data: Vec<u8>) -> Option<Frame> {
        (data.len() == FRAME_BYTES).then_some(Frame { data })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * FRAME_WIDTH + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Channel-major copy, (3, H, W).
    pub fn to_chw(&self) -> Vec<u8> {
        let plane = FRAME_WIDTH * FRAME_HEIGHT;
        let mut out = vec![0; FRAME_BYTES];
        for (i, px) in self.data.chunks_exact(3).enumerate() {
            out[i] = px[0];
            out[plane + i] = px[1];
            out[2 * plane + i] = px[2];
        }
        out
    }

    pub fn from_chw(chw: &[u8]) -> Option<Frame> {
        if chw.len() != FRAME_BYTES {
            return None;
        }
        let plane = FRAME_WIDTH * FRAME_HEIGHT;
        let mut data = vec![0; FRAME_BYTES];
        for i in 0..plane {
            data[i * 3] = chw[i];
            data[i * 3 + 1] = chw[plane + i];
            data[i * 3 + 2] = chw[2 * plane + i];
        }
        Some(Frame { data })
    }
}

/// Top-left map cell of the viewport.
pub fn view_origin(player: Pos) -> Pos {
    player.offset(-(VIEW_COLS / 2), -(VIEW_ROWS / 2))
}

/// Panel slot (column, row) for each stat and item, in drawing order.
pub fn panel_slot(index: usize) -> (usize, usize) {
    (index % PANEL_COLS, index / PANEL_COLS)
}

pub fn render(state: &EnvState) -> Frame {
    let mut frame = Frame::blank();
    render_into(state, &mut frame.data);
    frame
}

/// Renders into a caller-owned buffer of [`FRAME_BYTES`] bytes.
pub fn render_into(state: &EnvState, out: &mut [u8]) {
    assert_eq!(out.len(), FRAME_BYTES, "frame buffer size");
    let origin = view_origin(state.player.pos);
    let ripe_after = mechanics().plants.ripe_after;

    for row in 0..VIEW_ROWS {
        for col in 0..VIEW_COLS {
            let pos = origin.offset(col, row);
            let kind = state.grid.get(pos).unwrap_or(TileKind::Dark);
            let base = if kind == TileKind::Plant
                && state.grid.plant_at(pos).is_some_and(|(_, p)| p.grown > ripe_after)
            {
                sprite(SpriteKey::RipePlant)
            } else {
                sprites::tile_sprite(kind)
            };
            let (px, py) = (col as usize * TILE, row as usize * TILE);
            blit(out, px, py, base);
            let overlay = if pos == state.player.pos {
                Some(if state.player.sleeping {
                    SpriteKey::SleepingPlayer
                } else {
                    SpriteKey::Player(state.player.facing)
                })
            } else {
                state.mobs.at(pos).map(|(k, slot)| match k {
                    MobKind::Arrow => {
                        SpriteKey::Arrow(state.mobs.get(k, slot).expect("occupied slot").facing)
                    }
                    other => SpriteKey::Mob(other),
                })
            };
            if let Some(key) = overlay {
                blit(out, px, py, sprite(key));
            }
        }
    }

    let light = if state.player.sleeping { 0.0 } else { state.light_level };
    darken(&mut out[..PANEL_TOP * FRAME_WIDTH * 3], light);
    draw_panel(state, out);
}

fn blit(out: &mut [u8], px: usize, py: usize, sprite: &Sprite) {
    for y in 0..TILE {
        let row = ((py + y) * FRAME_WIDTH + px) * 3;
        for x in 0..TILE {
            let i = y * TILE + x;
            if sprite.opaque[i] {
                out[row + x * 3..row + x * 3 + 3].copy_from_slice(&sprite.rgb[i]);
            }
        }
    }
}

/// Linear darkening: full brightness at light 1, 40% at light 0.
fn darken(region: &mut [u8], light: f32) {
    let level = (light.clamp(0.0, 1.0) * 255.0).round() as u32;
    let factor = 102 + (154 * level) / 255;
    if factor >= 256 {
        return;
    }
    for b in region {
        *b = ((*b as u32 * factor) >> 8) as u8;
    }
}

fn draw_panel(state: &EnvState, out: &mut [u8]) {
    let p = &state.player;
    let mut entries: Vec<(SpriteKey, i32)> = Stat::ALL
        .iter()
        .zip(p.vitals())
        .map(|(&s, v)| (SpriteKey::Stat(s), v))
        .collect();
    entries.extend(Item::ALL.iter().map(|&i| (SpriteKey::Item(i), p.has(i) as i32)));
    for (index, (key, count)) in entries.into_iter().enumerate() {
        let is_item = matches!(key, SpriteKey::Item(_));
        if is_item && count == 0 {
            continue;
        }
        let (col, row) = panel_slot(index);
        draw_slot(out, col * TILE, PANEL_TOP + row * TILE, key, count.clamp(0, 9) as usize);
    }
}

/// Icon at half scale on the left, count digit on the right.
pub(crate) fn draw_slot(out: &mut [u8], px: usize, py: usize, key: SpriteKey, count: usize) {
    let icon = sprite(key);
    for y in 0..8 {
        for x in 0..8 {
            let i = (y * 2) * TILE + x * 2;
            if icon.opaque[i] {
                let o = ((py + 4 + y) * FRAME_WIDTH + px + x) * 3;
                out[o..o + 3].copy_from_slice(&icon.rgb[i]);
            }
        }
    }
    for (y, line) in sprites::DIGITS[count].iter().enumerate() {
        for (x, b) in line.bytes().enumerate() {
            if b == b'#' {
                for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let o = ((py + 3 + y * 2 + dy) * FRAME_WIDTH + px + 9 + x * 2 + dx) * 3;
                    out[o..o + 3].copy_from_slice(&[255, 255, 255]);
                }
            }
        }
    }
}
