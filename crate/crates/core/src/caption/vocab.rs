use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Achievement,
    Movement,
    Construction,
    Combat,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Achievement, Category::Movement, Category::Construction, Category::Combat];

    pub fn name(self) -> &'static str {
        match self {
            Category::Achievement => "achievement",
            Category::Movement => "movement",
            Category::Construction => "construction",
            Category::Combat => "combat",
        }
    }
}

/// The fifteen caption rules; the discriminant is the rule id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Rule {
    Harvest = 0,
    Place = 1,
    Craft = 2,
    Kill = 3,
    Sleep = 4,
    Stay = 5,
    Move = 6,
    Approach = 7,
    Flee = 8,
    Explore = 9,
    Shelter = 10,
    Path = 11,
    Tunnel = 12,
    AttackedBy = 13,
    BlockAttack = 14,
}

impl Rule {
    pub const COUNT: usize = 15;

    pub const ALL: [Rule; Rule::COUNT] = [
        Rule::Harvest,
        Rule::Place,
        Rule::Craft,
        Rule::Kill,
        Rule::Sleep,
        Rule::Stay,
        Rule::Move,
        Rule::Approach,
        Rule::Flee,
        Rule::Explore,
        Rule::Shelter,
        Rule::Path,
        Rule::Tunnel,
        Rule::AttackedBy,
        Rule::BlockAttack,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Rule> {
        Rule::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Harvest => "harvest",
            Rule::Place => "place",
            Rule::Craft => "craft",
            Rule::Kill => "kill",
            Rule::Sleep => "sleep",
            Rule::Stay => "stay",
            Rule::Move => "move",
            Rule::Approach => "approach",
            Rule::Flee => "flee",
            Rule::Explore => "explore",
            Rule::Shelter => "shelter",
            Rule::Path => "path",
            Rule::Tunnel => "tunnel",
            Rule::AttackedBy => "attacked_by",
            Rule::BlockAttack => "block_attack",
        }
    }

    pub fn category(self) -> Category {
        match self.id() {
            0..=4 => Category::Achievement,
            5..=9 => Category::Movement,
            10..=12 => Category::Construction,
            _ => Category::Combat,
        }
    }

    pub fn template(self) -> &'static str {
        match self {
            Rule::Harvest => "obtain {item}",
            Rule::Place => "place {item} on {material}",
            Rule::Craft => "craft {item}",
            Rule::Kill => "kill {mob}",
            Rule::Sleep => "go to sleep",
            Rule::Stay => "stay",
            Rule::Move => "move to {dir}",
            Rule::Approach => "approach {mob}",
            Rule::Flee => "flee from {mob}",
            Rule::Explore => "go explore",
            Rule::Shelter => "place {item} to build shelter",
            Rule::Path => "build path over {material}",
            Rule::Tunnel => "dig a tunnel",
            Rule::AttackedBy => "attacked by {mob}",
            Rule::BlockAttack => "block attack from {mob} with {item}",
        }
    }

    /// Every legal binding of this rule's placeholders.
    pub fn legal_bindings(self) -> Vec<Bindings> {
        let items = |xs: &[&str]| xs.iter().map(|&x| Bindings::new().item(x)).collect::<Vec<_>>();
        let mobs = |xs: &[&str]| xs.iter().map(|&x| Bindings::new().mob(x)).collect::<Vec<_>>();
        match self {
            Rule::Harvest => items(&["wood", "sapling", "drink", "stone", "coal", "iron", "diamond", "plant"]),
            Rule::Place => {
                let mut out = Vec::new();
                for m in ["grass", "sand", "path", "water", "lava"] {
                    out.push(Bindings::new().item("stone").material(m));
                }
                for item in ["table", "furnace"] {
                    for m in ["grass", "sand", "path"] {
                        out.push(Bindings::new().item(item).material(m));
                    }
                }
                out.push(Bindings::new().item("plant").material("grass"));
                out
            }
            Rule::Craft => items(&[
                "wood pickaxe",
                "stone pickaxe",
                "iron pickaxe",
                "wood sword",
                "stone sword",
                "iron sword",
            ]),
            Rule::Kill => mobs(&["cow", "zombie", "skeleton"]),
            Rule::Move => ["north", "south", "east", "west"].iter().map(|&d| Bindings::new().dir(d)).collect(),
            Rule::Approach => mobs(&["cow", "zombie", "skeleton", "plant"]),
            Rule::Flee => mobs(&["cow", "zombie", "skeleton", "arrow"]),
            Rule::Shelter => items(&BLOCKERS),
            Rule::Path => ["water", "lava"].iter().map(|&m| Bindings::new().material(m)).collect(),
            Rule::AttackedBy => mobs(&["zombie", "skeleton"]),
            Rule::BlockAttack => ["zombie", "skeleton"]
                .iter()
                .flat_map(|&mob| BLOCKERS.iter().map(move |&i| Bindings::new().mob(mob).item(i)))
                .collect(),
            Rule::Sleep | Rule::Stay | Rule::Explore | Rule::Tunnel => vec![Bindings::new()],
        }
    }
}

/// Items that can be placed to wall something off.
pub(crate) const BLOCKERS: [&str; 4] = ["stone", "table", "furnace", "plant"];

/// Placeholder values for a template.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub item: Option<String>,
    pub material: Option<String>,
    pub mob: Option<String>,
    pub dir: Option<String>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn item(mut self, v: &str) -> Self {
        self.item = Some(v.to_string());
        self
    }

    pub fn material(mut self, v: &str) -> Self {
        self.material = Some(v.to_string());
        self
    }

    pub fn mob(mut self, v: &str) -> Self {
        self.mob = Some(v.to_string());
        self
    }

    pub fn dir(mut self, v: &str) -> Self {
        self.dir = Some(v.to_string());
        self
    }
}

/// Substitutes `{item}`, `{material}`, `{mob}` and `{dir}` into the rule template.
pub fn render_caption(rule: Rule, bindings: &Bindings) -> Result<String> {
    let mut out = rule.template().to_string();
    let slots: [(&'static str, &Option<String>); 4] = [
        ("item", &bindings.item),
        ("material", &bindings.material),
        ("mob", &bindings.mob),
        ("dir", &bindings.dir),
    ];
    for (name, value) in slots {
        let key = format!("{{{name}}}");
        if out.contains(&key) {
            let v = value.as_deref().ok_or(Error::MissingBinding(name))?;
            out = out.replace(&key, &v.to_lowercase());
        }
    }
    Ok(out)
}

/// All 61 base captions, sorted.
pub fn list_caption_vocabulary() -> &'static [String] {
    static VOCAB: OnceLock<Vec<String>> = OnceLock::new();
    VOCAB.get_or_init(|| {
        let set: BTreeSet<String> = Rule::ALL
            .iter()
            .flat_map(|&r| r.legal_bindings().into_iter().map(move |b| render_caption(r, &b).expect("legal binding")))
            .collect();
        set.into_iter().collect()
    })
}

pub fn is_caption(text: &str) -> bool {
    list_caption_vocabulary().binary_search_by(|c| c.as_str().cmp(text)).is_ok()
}

/// The rule whose template produced `caption`.
pub fn rule_of(caption: &str) -> Option<Rule> {
    parse_caption(caption).map(|(r, _)| r)
}

/// Inverse of [`render_caption`] over the vocabulary.
pub fn parse_caption(caption: &str) -> Option<(Rule, Bindings)> {
    static INDEX: OnceLock<Vec<(String, Rule, Bindings)>> = OnceLock::new();
    let index = INDEX.get_or_init(|| {
        let mut v: Vec<_> = Rule::ALL
            .iter()
            .flat_map(|&r| {
                r.legal_bindings()
                    .into_iter()
                    .map(move |b| (render_caption(r, &b).expect("legal binding"), r, b))
            })
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    });
    let i = index.binary_search_by(|e| e.0.as_str().cmp(caption)).ok()?;
    Some((index[i].1, index[i].2.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition() {
        let count = |c| Rule::ALL.iter().filter(|r| r.category() == c).count();
        assert_eq!(
            Category::ALL.map(count),
            [5, 5, 3, 2]
        );
    }

    #[test]
    fn rule_ids_round_trip() {
        for r in Rule::ALL {
            assert_eq!(Rule::from_id(r.id()), Some(r));
        }
        assert_eq!(Rule::from_id(15), None);
    }

    #[test]
    fn rule_lookup() {
        assert_eq!(rule_of("dig a tunnel"), Some(Rule::Tunnel));
        assert_eq!(rule_of("place stone to build shelter"), Some(Rule::Shelter));
        assert_eq!(rule_of("fly"), None);
    }
}
