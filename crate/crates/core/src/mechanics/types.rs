use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::world::Direction;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident, $count:expr, [$($variant:ident => $text:literal),+ $(,)?]) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[repr(u8)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const COUNT: usize = $count;
            pub const ALL: [$name; $count] = [$($name::$variant),+];

            #[inline]
            pub fn index(self) -> usize {
                self as usize
            }

            pub fn from_index(i: usize) -> Option<$name> {
                $name::ALL.get(i).copied()
            }

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }

            pub fn from_name(name: &str) -> Option<$name> {
                match name { $($text => Some($name::$variant),)+ _ => None }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.name())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                $name::from_name(&s).ok_or_else(|| {
                    serde::de::Error::custom(format!(concat!("unknown ", stringify!($name), " {:?}"), s))
                })
            }
        }
    };
}

named_enum!(
    /// The 17 discrete actions, in canonical index order.
    Action, 17, [
        Noop => "noop",
        MoveLeft => "move_left",
        MoveRight => "move_right",
        MoveUp => "move_up",
        MoveDown => "move_down",
        Do => "do",
        Sleep => "sleep",
        PlaceStone => "place_stone",
        PlaceTable => "place_table",
        PlaceFurnace => "place_furnace",
        PlacePlant => "place_plant",
        MakeWoodPickaxe => "make_wood_pickaxe",
        MakeStonePickaxe => "make_stone_pickaxe",
        MakeIronPickaxe => "make_iron_pickaxe",
        MakeWoodSword => "make_wood_sword",
        MakeStoneSword => "make_stone_sword",
        MakeIronSword => "make_iron_sword",
    ]
);

named_enum!(
    /// Inventory items. Vital stats are tracked separately on the player.
    Item, 12, [
        Wood => "wood",
        Stone => "stone",
        Coal => "coal",
        Iron => "iron",
        Diamond => "diamond",
        Sapling => "sapling",
        WoodPickaxe => "wood_pickaxe",
        StonePickaxe => "stone_pickaxe",
        IronPickaxe => "iron_pickaxe",
        WoodSword => "wood_sword",
        StoneSword => "stone_sword",
        IronSword => "iron_sword",
    ]
);

named_enum!(
    Achievement, 22, [
        CollectWood => "collect_wood",
        PlaceTable => "place_table",
        EatCow => "eat_cow",
        CollectSapling => "collect_sapling",
        CollectDrink => "collect_drink",
        MakeWoodPickaxe => "make_wood_pickaxe",
        MakeWoodSword => "make_wood_sword",
        PlacePlant => "place_plant",
        DefeatZombie => "defeat_zombie",
        CollectStone => "collect_stone",
        PlaceStone => "place_stone",
        EatPlant => "eat_plant",
        DefeatSkeleton => "defeat_skeleton",
        CollectCoal => "collect_coal",
        MakeStonePickaxe => "make_stone_pickaxe",
        MakeStoneSword => "make_stone_sword",
        WakeUp => "wake_up",
        PlaceFurnace => "place_furnace",
        CollectIron => "collect_iron",
        MakeIronPickaxe => "make_iron_pickaxe",
        MakeIronSword => "make_iron_sword",
        CollectDiamond => "collect_diamond",
    ]
);

/// The fixed, ordered achievement list.
pub fn list_achievements() -> [&'static str; Achievement::COUNT] {
    Achievement::ALL.map(Achievement::name)
}

impl Action {
    pub fn direction(self) -> Option<Direction> {
        match self {
            Action::MoveLeft => Some(Direction::Left),
            Action::MoveRight => Some(Direction::Right),
            Action::MoveUp => Some(Direction::Up),
            Action::MoveDown => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn from_direction(dir: Direction) -> Action {
        match dir {
            Direction::Left => Action::MoveLeft,
            Direction::Right => Action::MoveRight,
            Direction::Up => Action::MoveUp,
            Direction::Down => Action::MoveDown,
        }
    }

    /// Name of the placed material for place actions.
    pub fn placed(self) -> Option<&'static str> {
        match self {
            Action::PlaceStone => Some("stone"),
            Action::PlaceTable => Some("table"),
            Action::PlaceFurnace => Some("furnace"),
            Action::PlacePlant => Some("plant"),
            _ => None,
        }
    }

    /// The tool produced by craft actions.
    pub fn crafted(self) -> Option<Item> {
        match self {
            Action::MakeWoodPickaxe => Some(Item::WoodPickaxe),
            Action::MakeStonePickaxe => Some(Item::StonePickaxe),
            Action::MakeIronPickaxe => Some(Item::IronPickaxe),
            Action::MakeWoodSword => Some(Item::WoodSword),
            Action::MakeStoneSword => Some(Item::StoneSword),
            Action::MakeIronSword => Some(Item::IronSword),
            _ => None,
        }
    }

    pub fn place_action(material: &str) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.placed() == Some(material))
    }

    pub fn craft_action(tool: Item) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.crafted() == Some(tool))
    }
}

impl Achievement {
    pub fn collect(item: &str) -> Option<Achievement> {
        Achievement::from_name(&format!("collect_{item}"))
    }

    pub fn place(material: &str) -> Option<Achievement> {
        Achievement::from_name(&format!("place_{material}"))
    }

    pub fn make(tool: Item) -> Option<Achievement> {
        Achievement::from_name(&format!("make_{}", tool.name()))
    }
}

/// A set of achievements as a 22-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AchievementSet(u32);

impl AchievementSet {
    pub const EMPTY: AchievementSet = AchievementSet(0);
    pub const FULL: AchievementSet = AchievementSet((1 << Achievement::COUNT) - 1);

    pub fn from_bits(bits: u32) -> Option<Self> {
        (bits & !Self::FULL.0 == 0).then_some(AchievementSet(bits))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, a: Achievement) -> bool {
        self.0 & (1 << a.index()) != 0
    }

    #[inline]
    pub fn insert(&mut self, a: Achievement) {
        self.0 |= 1 << a.index();
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        AchievementSet(self.0 | other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        AchievementSet(self.0 & !other.0)
    }

    pub fn is_superset(self, other: Self) -> bool {
        other.0 & !self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Achievement> {
        Achievement::ALL.into_iter().filter(move |&a| self.contains(a))
    }

    /// One flag per achievement in list order.
    pub fn to_flags(self) -> [bool; Achievement::COUNT] {
        Achievement::ALL.map(|a| self.contains(a))
    }
}

impl FromIterator<Achievement> for AchievementSet {
    fn from_iter<I: IntoIterator<Item = Achievement>>(iter: I) -> Self {
        let mut set = AchievementSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}

/// Reward in integer tenths, so sums are exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Reward(pub i32);

impl Reward {
    pub const ZERO: Reward = Reward(0);

    pub fn from_f64(value: f64) -> Reward {
        Reward((value * 10.0).round() as i32)
    }

    pub fn tenths(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl Add for Reward {
    type Output = Reward;
    fn add(self, rhs: Reward) -> Reward {
        Reward(self.0 + rhs.0)
    }
}

impl AddAssign for Reward {
    fn add_assign(&mut self, rhs: Reward) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Reward {
    fn sum<I: Iterator<Item = Reward>>(iter: I) -> Reward {
        Reward(iter.map(|r| r.0).sum())
    }
}

impl fmt::Display for Reward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        write!(f, "{sign}{}.{}", self.0.abs() / 10, self.0.abs() % 10)
    }
}
