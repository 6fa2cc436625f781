use crafter_foundry::mechanics::{Action, EnvConfig, EnvState, Item, MobKind};
use crafter_foundry::render::{
    decode_png, export_gif, render, save_png, sprite, Frame, SpriteKey, Stat, FRAME_BYTES, FRAME_WIDTH, TILE,
};
use crafter_foundry::world::{Direction, Pos, TileKind, WorldGrid};
use crafter_foundry::{Seed, Stream};
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn region(frame: &Frame, px: usize, py: usize) -> Vec<[u8; 3]> {
    (0..TILE)
        .flat_map(|y| (0..TILE).map(move |x| (x, y)))
        .map(|(x, y)| frame.pixel(px + x, py + y))
        .collect()
}

#[test]
fn frame_size() {
    let s = EnvState::reset(0, EnvConfig::default()).unwrap();
    assert_eq!(render(&s).as_bytes().len(), 62208);
    assert_eq!(FRAME_BYTES, 144 * 144 * 3);
}

#[test]
fn seed_zero_hash_is_pinned() {
    let s = EnvState::reset(0, EnvConfig::default()).unwrap();
    let frame = render(&s);
    assert_eq!(frame, render(&s));
    let digest = hex(frame.as_bytes());
    if std::env::var_os("PRINT_HASH").is_some() {
        println!("{digest}");
    }
    assert_eq!(digest, include_str!("fixtures/seed0_frame.sha256").trim());
}

/// Builds the expected 16×16 panel slot from the public sprite and a
/// hand-copied digit glyph.
fn expected_slot(icon: SpriteKey, glyph: [&str; 5]) -> Vec<[u8; 3]> {
    let mut px = vec![[0u8; 3]; TILE * TILE];
    let s = sprite(icon);
    for y in 0..8 {
        for x in 0..8 {
            let src = (2 * y) * TILE + 2 * x;
            if s.opaque[src] {
                px[(y + 4) * TILE + x] = s.rgb[src];
            }
        }
    }
    for (gy, row) in glyph.iter().enumerate() {
        for (gx, c) in row.chars().enumerate() {
            if c == '#' {
                for d in 0..4 {
                    let (x, y) = (9 + gx * 2 + d % 2, 3 + gy * 2 + d / 2);
                    px[y * TILE + x] = [255, 255, 255];
                }
            }
        }
    }
    px
}

#[test]
fn panel_shows_wood_count() {
    let mut s = EnvState::reset(0, EnvConfig::default()).unwrap();
    s.player.inventory[Item::Wood.index()] = 3;
    let frame = render(&s);
    // Stats take the first four slots; wood is the fifth.
    let three = ["###", "..#", "###", "..#", "###"];
    assert_eq!(region(&frame, 4 * TILE, 112), expected_slot(SpriteKey::Item(Item::Wood), three));
    let nine = ["###", "#.#", "###", "..#", "###"];
    assert_eq!(region(&frame, 0, 112), expected_slot(SpriteKey::Stat(Stat::Health), nine));
    // Empty items leave their slot blank.
    assert!(region(&frame, 5 * TILE, 112).iter().all(|&p| p == [0, 0, 0]));
}

#[test]
fn player_is_always_centered() {
    let mut rng = Seed::new(99, Stream::Episode).rng();
    let mut checked = 0;
    for seed in 0..100u64 {
        let mut s = EnvState::reset(seed, EnvConfig::default()).unwrap();
        let steps = rng.below(200);
        for _ in 0..steps {
            if s.done {
                break;
            }
            s.step(Action::ALL[rng.below(17) as usize]).unwrap();
        }
        s.player.sleeping = false;
        s.light_level = 1.0;
        let frame = render(&s);
        let body = sprite(SpriteKey::Player(s.player.facing));
        let got = region(&frame, 4 * TILE, 3 * TILE);
        for (i, px) in got.iter().enumerate() {
            if body.opaque[i] {
                assert_eq!(*px, body.rgb[i], "seed {seed}");
            }
        }
        checked += 1;
    }
    assert_eq!(checked, 100);
}

#[test]
fn edge_cells_render_dark() {
    let mut s = EnvState::reset(0, EnvConfig::default()).unwrap();
    s.mobs = Default::default();
    s.player.pos = Pos::new(0, 0);
    s.light_level = 1.0;
    let frame = render(&s);
    let dark = sprite(SpriteKey::Tile(TileKind::Dark));
    assert_eq!(region(&frame, 0, 0), dark.rgb.to_vec());
    assert_eq!(region(&frame, 3 * TILE, 2 * TILE), dark.rgb.to_vec());
}

#[test]
fn night_is_darker() {
    let mut s = EnvState::reset(0, EnvConfig::default()).unwrap();
    s.light_level = 1.0;
    let day = render(&s);
    s.light_level = 0.0;
    let night = render(&s);
    let sum = |f: &Frame, end: usize| f.as_bytes()[..end].iter().map(|&b| b as u64).sum::<u64>();
    let view = 112 * FRAME_WIDTH * 3;
    assert!(sum(&night, view) < sum(&day, view) / 2);
    assert_eq!(&night.as_bytes()[view..], &day.as_bytes()[view..]);
}

#[test]
fn atlas_is_complete() {
    let keys = SpriteKey::all();
    for t in TileKind::ALL {
        assert!(keys.contains(&SpriteKey::Tile(t)));
    }
    for k in [MobKind::Cow, MobKind::Zombie, MobKind::Skeleton] {
        assert!(keys.contains(&SpriteKey::Mob(k)));
    }
    for d in Direction::ALL {
        assert!(keys.contains(&SpriteKey::Arrow(d)));
        assert!(keys.contains(&SpriteKey::Player(d)));
    }
    for i in Item::ALL {
        assert!(keys.contains(&SpriteKey::Item(i)));
    }
    for k in keys {
        assert!(sprite(k).opaque.iter().any(|&o| o), "{k:?}");
    }
}

#[test]
fn every_tile_renders() {
    let mut s = EnvState::reset(0, EnvConfig::default()).unwrap();
    s.mobs = Default::default();
    s.grid = WorldGrid::filled(TileKind::Grass, Pos::new(32, 32));
    s.player.pos = Pos::new(32, 32);
    s.light_level = 1.0;
    for (i, t) in TileKind::ALL.into_iter().enumerate() {
        let pos = Pos::new(28 + (i as i32 % 9), 29 + (i as i32 / 9));
        if pos != s.player.pos {
            s.grid.set(pos, t);
        }
    }
    let frame = render(&s);
    let sand = sprite(SpriteKey::Tile(TileKind::Sand)).rgb.to_vec();
    assert_eq!(region(&frame, TILE, 0), sand);
}

#[test]
fn png_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = EnvState::reset(5, EnvConfig::default()).unwrap();
    let frame = render(&s);
    let path = dir.path().join("f.png");
    save_png(&frame, &path).unwrap();
    let back = decode_png(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(back, frame);
}

fn gif_frames(path: &std::path::Path) -> Vec<Vec<u8>> {
    let mut opts = gif::DecodeOptions::new();
    opts.set_color_output(gif::ColorOutput::RGBA);
    let mut decoder = opts.read_info(std::fs::File::open(path).unwrap()).unwrap();
    let mut out = Vec::new();
    while let Some(f) = decoder.read_next_frame().unwrap() {
        out.push(f.buffer.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect());
    }
    out
}

#[test]
fn gif_export() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = EnvState::reset(1, EnvConfig::default()).unwrap();
    let mut frames = vec![render(&s)];
    for a in [Action::MoveLeft, Action::MoveLeft, Action::MoveUp, Action::Do, Action::MoveRight] {
        s.step(a).unwrap();
        frames.push(render(&s));
    }
    let one = dir.path().join("one.gif");
    export_gif(&frames[..1], &one, 10).unwrap();
    assert_eq!(gif_frames(&one).len(), 1);

    let six = dir.path().join("six.gif");
    export_gif(&frames, &six, 10).unwrap();
    let decoded = gif_frames(&six);
    assert_eq!(decoded.len(), 6);
    for (d, f) in decoded.iter().zip(&frames) {
        assert_eq!(d.as_slice(), f.as_bytes(), "palette must be lossless");
    }

    let err = export_gif(&[], &dir.path().join("none.gif"), 10).unwrap_err();
    assert!(matches!(err, crafter_foundry::Error::EmptyInput(_)));
}

#[test]
fn chw_round_trip() {
    let s = EnvState::reset(2, EnvConfig::default()).unwrap();
    let frame = render(&s);
    let chw = frame.to_chw();
    assert_eq!(chw[0], frame.pixel(0, 0)[0]);
    assert_eq!(chw[144 * 144], frame.pixel(0, 0)[1]);
    assert_eq!(Frame::from_chw(&chw).unwrap(), frame);
}
