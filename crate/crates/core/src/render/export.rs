use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Cursor};
use std::path::Path;

use super::{Frame, FRAME_BYTES, FRAME_HEIGHT, FRAME_WIDTH};
use crate::error::{Error, Result};

fn encoding(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

pub fn save_png(frame: &Frame, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), FRAME_WIDTH as u32, FRAME_HEIGHT as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| encoding(path, e))?;
    writer.write_image_data(frame.as_bytes()).map_err(|e| encoding(path, e))?;
    writer.finish().map_err(|e| encoding(path, e))
}

/// Reads back an RGB PNG written by [`save_png`].
pub fn decode_png(bytes: &[u8]) -> Result<Frame> {
    let bad = |e: &dyn std::fmt::Display| Error::MalformedContainer(format!("png: {e}"));
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| bad(&e))?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(FRAME_BYTES)];
    let info = reader.next_frame(&mut buf).map_err(|e| bad(&e))?;
    buf.truncate(info.buffer_size());
    Frame::from_bytes(buf).ok_or_else(|| bad(&"unexpected image size"))
}

/// Writes an animated GIF with an exact palette per frame.
pub fn export_gif(frames: &[Frame], path: &Path, delay_cs: u16) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::EmptyInput("no frames to export"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = gif::Encoder::new(BufWriter::new(file), FRAME_WIDTH as u16, FRAME_HEIGHT as u16, &[])
        .map_err(|e| encoding(path, e))?;
    encoder.set_repeat(gif::Repeat::Infinite).map_err(|e| encoding(path, e))?;
    for frame in frames {
        let mut palette = Vec::new();
        let mut index: HashMap<[u8; 3], u8> = HashMap::new();
        let mut pixels = Vec::with_capacity(FRAME_WIDTH * FRAME_HEIGHT);
        for px in frame.as_bytes().chunks_exact(3) {
            let rgb = [px[0], px[1], px[2]];
            let next = index.len();
            let i = match index.get(&rgb) {
                Some(&i) => i,
                None => {
                    if next == 256 {
                        return Err(Error::InvalidConfig("frame has more than 256 colors".into()));
                    }
                    palette.extend_from_slice(&rgb);
                    index.insert(rgb, next as u8);
                    next as u8
                }
            };
            pixels.push(i);
        }
        let mut f = gif::Frame::from_palette_pixels(FRAME_WIDTH as u16, FRAME_HEIGHT as u16, pixels, palette, None);
        f.delay = delay_cs;
        encoder.write_frame(&f).map_err(|e| encoding(path, e))?;
    }
    Ok(())
}
