use serde::{Deserialize, Serialize};

/// Material of a single grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum TileKind {
    Water = 0,
    Sand = 1,
    Grass = 2,
    Tree = 3,
    Stone = 4,
    Path = 5,
    CoalOre = 6,
    IronOre = 7,
    DiamondOre = 8,
    Lava = 9,
    Table = 10,
    Furnace = 11,
    Plant = 12,
    Dark = 13,
}

impl TileKind {
    pub const COUNT: usize = 14;

    pub const ALL: [TileKind; TileKind::COUNT] = [
        TileKind::Water,
        TileKind::Sand,
        TileKind::Grass,
        TileKind::Tree,
        TileKind::Stone,
        TileKind::Path,
        TileKind::CoalOre,
        TileKind::IronOre,
        TileKind::DiamondOre,
        TileKind::Lava,
        TileKind::Table,
        TileKind::Furnace,
        TileKind::Plant,
        TileKind::Dark,
    ];

    #[inline]
    pub fn from_u8(v: u8) -> Option<TileKind> {
        TileKind::ALL.get(v as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TileKind::Water => "water",
            TileKind::Sand => "sand",
            TileKind::Grass => "grass",
            TileKind::Tree => "tree",
            TileKind::Stone => "stone",
            TileKind::Path => "path",
            TileKind::CoalOre => "coal_ore",
            TileKind::IronOre => "iron_ore",
            TileKind::DiamondOre => "diamond_ore",
            TileKind::Lava => "lava",
            TileKind::Table => "table",
            TileKind::Furnace => "furnace",
            TileKind::Plant => "plant",
            TileKind::Dark => "dark",
        }
    }

    pub fn from_name(name: &str) -> Option<TileKind> {
        TileKind::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Walkable for the player and for zombies.
    #[inline]
    pub fn is_walkable(self) -> bool {
        matches!(self, TileKind::Grass | TileKind::Sand | TileKind::Path)
    }

    /// Part of the mountain region (rock, ores, caves, lava).
    #[inline]
    pub fn is_mountain(self) -> bool {
        matches!(
            self,
            TileKind::Stone
                | TileKind::Path
                | TileKind::CoalOre
                | TileKind::IronOre
                | TileKind::DiamondOre
                | TileKind::Lava
        )
    }

    /// Rock that can be mined into path.
    #[inline]
    pub fn is_rock(self) -> bool {
        matches!(
            self,
            TileKind::Stone | TileKind::CoalOre | TileKind::IronOre | TileKind::DiamondOre
        )
    }
}
