//! Hand-drawn 8×8 sprites, doubled to 16×16 at load time.
//!
//! Each sprite is eight rows of palette keys; `.` is transparent.

use std::sync::OnceLock;

use crate::mechanics::{Item, MobKind};
use crate::world::{Direction, TileKind};

pub const TILE: usize = 16;
const ART: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stat {
    Health,
    Food,
    Drink,
    Energy,
}

impl Stat {
    pub const ALL: [Stat; 4] = [Stat::Health, Stat::Food, Stat::Drink, Stat::Energy];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpriteKey {
    Tile(TileKind),
    RipePlant,
    Player(Direction),
    SleepingPlayer,
    Mob(MobKind),
    Arrow(Direction),
    Item(Item),
    Stat(Stat),
}

impl SpriteKey {
    /// Every key the renderer can ask for.
    pub fn all() -> Vec<SpriteKey> {
        let mut keys: Vec<SpriteKey> = TileKind::ALL.into_iter().map(SpriteKey::Tile).collect();
        keys.push(SpriteKey::RipePlant);
        keys.extend(Direction::ALL.map(SpriteKey::Player));
        keys.push(SpriteKey::SleepingPlayer);
        keys.extend([MobKind::Cow, MobKind::Zombie, MobKind::Skeleton].map(SpriteKey::Mob));
        keys.extend(Direction::ALL.map(SpriteKey::Arrow));
        keys.extend(Item::ALL.map(SpriteKey::Item));
        keys.extend(Stat::ALL.map(SpriteKey::Stat));
        keys
    }
}

fn color(key: u8) -> Option<[u8; 3]> {
    Some(match key {
        b'.' => return None,
        b'k' => [20, 20, 20],
        b'w' => [240, 240, 240],
        b'g' => [92, 168, 72],
        b'G' => [54, 122, 44],
        b'b' => [58, 108, 200],
        b'B' => [112, 160, 232],
        b's' => [222, 202, 140],
        b'S' => [198, 176, 116],
        b'r' => [132, 132, 132],
        b'R' => [92, 92, 92],
        b'p' => [172, 150, 118],
        b'P' => [148, 128, 98],
        b'n' => [124, 82, 40],
        b'N' => [82, 52, 24],
        b'c' => [28, 28, 28],
        b'i' => [214, 162, 122],
        b'd' => [140, 238, 240],
        b'l' => [232, 98, 22],
        b'L' => [250, 182, 42],
        b'f' => [244, 124, 30],
        b'h' => [206, 32, 32],
        b'y' => [244, 222, 60],
        b'm' => [240, 190, 150],
        b'u' => [52, 82, 182],
        b'z' => [86, 162, 84],
        b'Z' => [42, 102, 42],
        b'x' => [226, 226, 210],
        b'q' => [24, 24, 34],
        b'e' => [236, 84, 120],
        _ => panic!("unknown palette key {:?}", key as char),
    })
}

fn art(key: SpriteKey) -> [&'static str; ART] {
    match key {
        SpriteKey::Tile(t) => match t {
            TileKind::Water => ["bbbbbbbb", "bBbbbbbb", "bbbbbBBb", "bbbbbbbb", "bbBBbbbb", "bbbbbbbb", "bbbbbbBb", "bbbbbbbb"],
            TileKind::Sand => ["ssssssss", "sSssssss", "sssssSss", "ssssssss", "ssSsssss", "sssssssS", "ssssSsss", "ssssssss"],
            TileKind::Grass => ["gggggggg", "gGgggggg", "gggggGgg", "gggggggg", "ggGggggg", "gggggggG", "ggggGggg", "gggggggg"],
            TileKind::Tree => ["gGGGGGGg", "GGgGGGGG", "GGGGGgGG", "GgGGGGGG", "gGGGGGGg", "gggNNggg", "gggNNggg", "gggggggg"],
            TileKind::Stone => ["rrrrrrrr", "rRrrrrrr", "rrrrrRrr", "rrRrrrrr", "rrrrrrrr", "rrrrrrRr", "rRrrrrrr", "rrrrRrrr"],
            TileKind::Path => ["pppppppp", "pPpppppp", "pppppPpp", "pppppppp", "ppPppppp", "pppppppP", "ppppPppp", "pppppppp"],
            TileKind::CoalOre => ["rrrrrrrr", "rccrrrrr", "rccrrccr", "rrrrrccr", "rrrrrrrr", "rrccrrrr", "rrccrrRr", "rrrrrrrr"],
            TileKind::IronOre => ["rrrrrrrr", "riirrrrr", "riirriir", "rrrrriir", "rrrrrrrr", "rriirrrr", "rriirrRr", "rrrrrrrr"],
            TileKind::DiamondOre => ["rrrrrrrr", "rdwrrrrr", "rddrrdwr", "rrrrrddr", "rrrrrrrr", "rrdwrrrr", "rrddrrRr", "rrrrrrrr"],
            TileKind::Lava => ["llllllll", "lLLlllll", "llLLllll", "lllllLLl", "llllllLl", "lLllllll", "lLLlllll", "llllllll"],
            TileKind::Table => ["ssssssss", "nnnnnnnn", "NNNNNNNN", "snssssns", "snssssns", "snssssns", "snssssns", "ssssssss"],
            TileKind::Furnace => ["RRRRRRRR", "RrrrrrrR", "RrRRRRrR", "RrRffRrR", "RrRffRrR", "RrRRRRrR", "RrrrrrrR", "RRRRRRRR"],
            TileKind::Plant => ["gggggggg", "gggggggg", "gggzgggg", "ggzzzggg", "gggzGggg", "gggGGggg", "gggGgggg", "gggggggg"],
            TileKind::Dark => ["qqqqqqqq"; ART],
        },
        SpriteKey::RipePlant => ["gggggggg", "ggezegGg", "gzeeezgg", "ggzezzgg", "gggzGggg", "gggGGggg", "gggGgggg", "gggggggg"],
        SpriteKey::Player(_) => ["..kmmk..", "..mmmm..", ".uuuuuu.", "muuuuuum", "muuuuuum", ".uuuuuu.", "..u..u..", "..N..N.."],
        SpriteKey::SleepingPlayer => ["........", "........", ".mmuuuu.", "mkmuuuuu", "mmmuuuuu", ".mmuuuu.", "........", "........"],
        SpriteKey::Mob(MobKind::Cow) => ["........", "Nw....Nw", "nnwnnwnn", "nwwnnnwn", "nnnnwwnn", ".nnnnnn.", ".n.n.n.n", ".k.k.k.k"],
        SpriteKey::Mob(MobKind::Zombie) => ["..zzzz..", "..hzzh..", ".ZZZZZZ.", "zZZZZZZz", "zZZZZZZz", ".ZZZZZZ.", "..Z..Z..", "..z..z.."],
        SpriteKey::Mob(MobKind::Skeleton) => ["..xxxx..", "..kxxk..", "...xx...", ".xxxxxx.", "x.xxxx.x", "..x..x..", "..x..x..", ".xx..xx."],
        SpriteKey::Mob(MobKind::Arrow) | SpriteKey::Arrow(_) => ["...rr...", "..rrrr..", "...nn...", "...nn...", "...nn...", "...nn...", "..w..w..", "..w..w.."],
        SpriteKey::Item(item) => match item {
            Item::Wood => ["........", "........", ".NNNNNn.", "Nnnnnnnn", "NnnNnnnn", ".NNNNNn.", "........", "........"],
            Item::Stone => ["........", "..rrrr..", ".rrRrrr.", "rrrrrRrr", "rRrrrrrr", ".rrrrRr.", "........", "........"],
            Item::Coal => ["........", "..cccc..", ".ccRccc.", "cccccRcc", "cRcccccc", ".ccccRc.", "........", "........"],
            Item::Iron => ["........", "........", "..iiiii.", ".iiwiii.", "iiiiii..", "........", "........", "........"],
            Item::Diamond => ["........", "..dddd..", ".dwddwd.", "dddddddd", ".dddddd.", "..dddd..", "...dd...", "........"],
            Item::Sapling => ["........", "...z....", "..zzz...", "...z.z..", "...zz...", "...G....", "..nnn...", "........"],
            Item::WoodPickaxe => [".nnnnnn.", "n..NN..n", "...NN...", "...NN...", "...NN...", "...NN...", "...NN...", "........"],
            Item::StonePickaxe => [".rrrrrr.", "r..NN..r", "...NN...", "...NN...", "...NN...", "...NN...", "...NN...", "........"],
            Item::IronPickaxe => [".iiiiii.", "i..NN..i", "...NN...", "...NN...", "...NN...", "...NN...", "...NN...", "........"],
            Item::WoodSword => ["......nn", ".....nn.", "....nn..", "...nn...", ".NNn....", "..N.....", ".N.N....", "........"],
            Item::StoneSword => ["......rr", ".....rr.", "....rr..", "...rr...", ".NNr....", "..N.....", ".N.N....", "........"],
            Item::IronSword => ["......ii", ".....ii.", "....ii..", "...ii...", ".NNi....", "..N.....", ".N.N....", "........"],
        },
        SpriteKey::Stat(stat) => match stat {
            Stat::Health => ["........", ".hh.hh..", "hhhhhhh.", "hhhhhhh.", ".hhhhh..", "..hhh...", "...h....", "........"],
            Stat::Food => ["....N...", "...N....", ".hhhhh..", "hhhwhhh.", "hhhhhhh.", "hhhhhhh.", ".hhhhh..", "........"],
            Stat::Drink => ["...B....", "...B....", "..BBB...", ".BBbBB..", ".BbbbB..", ".BbbbB..", "..BBB...", "........"],
            Stat::Energy => ["....yy..", "...yy...", "..yy....", ".yyyyy..", "...yy...", "..yy....", ".yy.....", "........"],
        },
    }
}

/// A 16×16 sprite with per-pixel opacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sprite {
    pub rgb: [[u8; 3]; TILE * TILE],
    pub opaque: [bool; TILE * TILE],
}

impl Sprite {
    pub fn is_opaque(&self) -> bool {
        self.opaque.iter().all(|&o| o)
    }
}

/// Pixel of an 8×8 art grid after rotating it to face `dir` (art faces up).
fn rotated(rows: &[&str; ART], dir: Option<Direction>, x: usize, y: usize) -> u8 {
    let (sx, sy) = match dir {
        None | Some(Direction::Up) => (x, y),
        Some(Direction::Down) => (x, ART - 1 - y),
        Some(Direction::Left) => (y, x),
        Some(Direction::Right) => (ART - 1 - y, x),
    };
    rows[sy].as_bytes()[sx]
}

fn build(key: SpriteKey) -> Sprite {
    let rows = art(key);
    let dir = match key {
        SpriteKey::Player(d) | SpriteKey::Arrow(d) => Some(d),
        _ => None,
    };
    let mut sprite = Sprite {
        rgb: [[0; 3]; TILE * TILE],
        opaque: [false; TILE * TILE],
    };
    for y in 0..TILE {
        for x in 0..TILE {
            if let Some(c) = color(rotated(&rows, dir, x / 2, y / 2)) {
                sprite.rgb[y * TILE + x] = c;
                sprite.opaque[y * TILE + x] = true;
            }
        }
    }
    sprite
}

struct Atlas {
    keys: Vec<SpriteKey>,
    sprites: Vec<Sprite>,
}

fn atlas() -> &'static Atlas {
    static ATLAS: OnceLock<Atlas> = OnceLock::new();
    ATLAS.get_or_init(|| {
        let keys = SpriteKey::all();
        let sprites = keys.iter().map(|&k| build(k)).collect();
        Atlas { keys, sprites }
    })
}

/// Looks up a sprite; every key from [`SpriteKey::all`] is present.
pub fn sprite(key: SpriteKey) -> &'static Sprite {
    let a = atlas();
    let i = a.keys.iter().position(|&k| k == key).expect("sprite in atlas");
    &a.sprites[i]
}

/// Fast path used while rendering; indexes match [`SpriteKey::all`] order.
pub(crate) fn tile_sprite(kind: TileKind) -> &'static Sprite {
    &atlas().sprites[kind as usize]
}

pub(crate) const DIGITS: [[&str; 5]; 10] = [
    ["###", "#.#", "#.#", "#.#", "###"],
    [".#.", "##.", ".#.", ".#.", "###"],
    ["###", "..#", "###", "#..", "###"],
    ["###", "..#", "###", "..#", "###"],
    ["#.#", "#.#", "###", "..#", "..#"],
    ["###", "#..", "###", "..#", "###"],
    ["###", "#..", "###", "#.#", "###"],
    ["###", "..#", "..#", "..#", "..#"],
    ["###", "#.#", "###", "#.#", "###"],
    ["###", "#.#", "###", "..#", "###"],
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn art_rows_are_square() {
        for key in SpriteKey::all() {
            for row in art(key) {
                assert_eq!(row.len(), ART, "{key:?}");
                for b in row.bytes() {
                    let _ = color(b);
                }
            }
        }
    }

    #[test]
    fn tiles_are_opaque_and_indexed() {
        for t in TileKind::ALL {
            assert!(tile_sprite(t).is_opaque());
            assert_eq!(tile_sprite(t), sprite(SpriteKey::Tile(t)));
        }
    }
}
