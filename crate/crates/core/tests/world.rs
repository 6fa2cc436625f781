use std::collections::VecDeque;

use crafter_foundry::world::{generate_world, stone_region_depth, Pos, TileKind, WorldGrid, MAP_SIZE};
use crafter_foundry::{Error, Seed, Stream};

fn world(seed: u64) -> WorldGrid {
    generate_world(Seed::new(seed, Stream::Terrain)).unwrap()
}

/// Independent flood fill over grass, sand and path.
fn reachable(grid: &WorldGrid) -> Vec<Pos> {
    let open = |t: TileKind| matches!(t, TileKind::Grass | TileKind::Sand | TileKind::Path);
    let mut seen = vec![false; (MAP_SIZE * MAP_SIZE) as usize];
    let mut out = vec![];
    let mut q = VecDeque::from([grid.spawn_point]);
    seen[(grid.spawn_point.y * MAP_SIZE + grid.spawn_point.x) as usize] = true;
    while let Some(p) = q.pop_front() {
        out.push(p);
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = Pos { x: p.x + dx, y: p.y + dy };
            if n.x < 0 || n.y < 0 || n.x >= MAP_SIZE || n.y >= MAP_SIZE {
                continue;
            }
            let i = (n.y * MAP_SIZE + n.x) as usize;
            if !seen[i] && open(grid.get(n).unwrap()) {
                seen[i] = true;
                q.push_back(n);
            }
        }
    }
    out
}

fn touches(grid: &WorldGrid, cells: &[Pos], kind: TileKind) -> bool {
    cells.iter().any(|p| {
        [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(dx, dy)| grid.get(Pos { x: p.x + dx, y: p.y + dy }) == Some(kind))
    })
}

#[test]
fn generation_is_deterministic() {
    let first = world(0).to_bytes();
    for _ in 0..10 {
        assert_eq!(world(0).to_bytes(), first);
    }
    assert_ne!(world(0).tiles(), world(1).tiles());
}

#[test]
fn spawn_region_and_resources_reachable() {
    for seed in 0..100 {
        let g = world(seed);
        assert_eq!(g.tile_at(g.spawn_point).unwrap(), TileKind::Grass, "seed {seed}");
        let cells = reachable(&g);
        let grass = cells.iter().filter(|&&p| g.get(p) == Some(TileKind::Grass)).count();
        assert!(grass >= 25, "seed {seed}: {grass} grass cells");
        for kind in [TileKind::Tree, TileKind::Water, TileKind::Stone] {
            assert!(touches(&g, &cells, kind), "seed {seed}: no reachable {kind:?}");
        }
    }
}

#[test]
fn ores_are_layered_by_depth() {
    for seed in 0..100 {
        let g = world(seed);
        let depth = stone_region_depth(&g);
        let min_depth = |kind| {
            g.tiles().iter().zip(&depth).filter(|(t, _)| **t == kind).map(|(_, d)| *d).min()
        };
        let (coal, iron, diamond) = (min_depth(TileKind::CoalOre), min_depth(TileKind::IronOre), min_depth(TileKind::DiamondOre));
        if let (Some(c), Some(i)) = (coal, iron) {
            assert!(i >= c, "seed {seed}: iron {i} above coal {c}");
        }
        if let (Some(i), Some(d)) = (iron, diamond) {
            assert!(d >= i, "seed {seed}: diamond {d} above iron {i}");
        }
    }
}

#[test]
fn tile_lookup_bounds() {
    let g = world(3);
    assert!(matches!(g.tile_at(Pos { x: 64, y: 0 }), Err(Error::OutOfBounds { x: 64, y: 0 })));
    assert!(matches!(g.tile_at(Pos { x: 0, y: -1 }), Err(Error::OutOfBounds { .. })));
    assert_eq!(g.tiles().len(), 64 * 64);
}

#[test]
fn tile_frequencies_are_plausible() {
    let mut counts = [0usize; TileKind::COUNT];
    for seed in 0..20 {
        for &t in world(seed).tiles() {
            counts[t as usize] += 1;
        }
    }
    let share = |k: TileKind| counts[k as usize] as f64 / (20.0 * 4096.0);
    assert!((0.25..0.70).contains(&share(TileKind::Grass)), "grass {}", share(TileKind::Grass));
    assert!(share(TileKind::Stone) > 0.05);
    assert!(share(TileKind::Water) > 0.01);
    assert!(share(TileKind::Tree) > 0.01);
    assert!(share(TileKind::DiamondOre) < share(TileKind::CoalOre));
}
