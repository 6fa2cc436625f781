//! Environment dynamics: actions, survival, crafting, combat, creatures and reward.

mod defaults;
mod mobs;
mod state;
mod step;
mod types;

pub use defaults::{
    install, mechanics, CaptionRules, CollectRule, MakeRule, Mechanics, PlaceRule, Yield, DEFAULT_TABLE,
};
pub use state::{
    Damage, DamageCause, EnvConfig, EnvState, Mob, MobKind, Mobs, PlayerState, TileMask, ARROW_SPACE, GROUND,
    MAX_ARROWS, MAX_COWS, MAX_SKELETONS, MAX_ZOMBIES, PLAYER_MAP_CODE, TUNNEL,
};
pub use step::{compute_reward, legal_effective_action, StepInfo, StepResult};
pub use types::{list_achievements, Achievement, AchievementSet, Action, Item, Reward};
