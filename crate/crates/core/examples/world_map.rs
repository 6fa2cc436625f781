//! Prints a generated world as ASCII plus its tile histogram.
//!
//! `cargo run --example world_map -- [seed]`

use crafter_foundry::world::{generate_world, Pos, TileKind, WorldGrid, MAP_SIZE};
use crafter_foundry::{Seed, Stream};

fn glyph(t: TileKind) -> char {
    match t {
        TileKind::Water => '~',
        TileKind::Grass => '.',
        TileKind::Stone => '#',
        TileKind::Path => '_',
        TileKind::Sand => ':',
        TileKind::Tree => 'T',
        TileKind::Lava => '!',
        TileKind::CoalOre => 'c',
        TileKind::IronOre => 'i',
        TileKind::DiamondOre => 'D',
        TileKind::Table => 't',
        TileKind::Furnace => 'f',
        _ => '?',
    }
}

fn main() -> crafter_foundry::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let grid = generate_world(Seed::new(seed, Stream::Terrain))?;
    for y in 0..MAP_SIZE {
        let row: String = (0..MAP_SIZE)
            .map(|x| {
                let p = Pos::new(x, y);
                if p == grid.spawn_point { '@' } else { grid.get(p).map_or(' ', glyph) }
            })
            .collect();
        println!("{row}");
    }
    let total = WorldGrid::positions().count() as f64;
    for t in TileKind::ALL {
        let n = grid.count(t);
        if n > 0 {
            println!("{:<12} {:>5} {:>5.1}%", t.name(), n, n as f64 / total * 100.0);
        }
    }
    Ok(())
}
