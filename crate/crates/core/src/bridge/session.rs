use base64::Engine as _;
use serde::Deserialize;
use serde_json::{json, Value};

use super::protocol::{Request, Response, WireError};
use crate::mechanics::{list_achievements, Action, EnvConfig, EnvState, Item, StepResult};
use crate::render::{render, FRAME_HEIGHT, FRAME_WIDTH};

/// One connection's environment and protocol state.
#[derive(Clone, Debug)]
pub struct Session {
    config: EnvConfig,
    env: Option<EnvState>,
}

#[derive(Deserialize)]
struct ResetArgs {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    config: Option<EnvConfig>,
    #[serde(default)]
    render: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ActionArg {
    Index(usize),
    Name(String),
}

#[derive(Deserialize)]
struct StepArgs {
    action: ActionArg,
    #[serde(default)]
    render: bool,
}

fn bad_args(e: serde_json::Error) -> WireError {
    WireError::new("BadRequest", format!("invalid args: {e}"))
}

fn args<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, WireError> {
    let v = if v.is_null() { json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(bad_args)
}

/// Summary of the player and episode visible to clients.
pub fn state_info(s: &EnvState) -> Value {
    let inventory: serde_json::Map<String, Value> =
        Item::ALL.iter().map(|&i| (i.name().to_string(), json!(s.player.has(i)))).collect();
    json!({
        "step": s.step_count,
        "health": s.player.health,
        "food": s.player.food,
        "drink": s.player.drink,
        "energy": s.player.energy,
        "sleeping": s.player.sleeping,
        "position": [s.player.pos.x, s.player.pos.y],
        "light_level": s.light_level,
        "inventory": inventory,
        "achievements": s.achievements.iter().map(|a| a.name()).collect::<Vec<_>>(),
    })
}

pub fn frame_payload(s: &EnvState) -> Value {
    let frame = render(s);
    json!({
        "height": FRAME_HEIGHT,
        "width": FRAME_WIDTH,
        "channels": 3,
        "encoding": "base64",
        "data": base64::engine::general_purpose::STANDARD.encode(frame.as_bytes()),
    })
}

pub fn spec_payload() -> Value {
    json!({
        "actions": Action::ALL.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "observation_shape": [FRAME_HEIGHT, FRAME_WIDTH, 3],
        "achievements": list_achievements(),
    })
}

impl Session {
    pub fn new(config: EnvConfig) -> Self {
        Session { config, env: None }
    }

    pub fn state(&self) -> Option<&EnvState> {
        self.env.as_ref()
    }

    /// Answers one request. The flag is true once the client asked to close.
    pub fn handle(&mut self, req: &Request) -> (Response, bool) {
        let id = req.id.clone();
        let result = match req.op.as_str() {
            "spec" => Ok(spec_payload()),
            "reset" => self.reset(&req.args),
            "step" => self.step(&req.args),
            "render" => self.env.as_ref().map(frame_payload).ok_or_else(not_reset),
            "close" => {
                self.env = None;
                return (Response::ok(id, Value::Null), true);
            }
            other => Err(WireError::new("UnknownOp", format!("unknown op {other:?}"))),
        };
        let resp = match result {
            Ok(p) => Response::ok(id, p),
            Err(e) => Response::err(id, e),
        };
        (resp, false)
    }

    fn reset(&mut self, raw: &Value) -> Result<Value, WireError> {
        let a: ResetArgs = args(raw)?;
        let config = a.config.unwrap_or_else(|| self.config.clone());
        let env = EnvState::reset(a.seed, config)?;
        let mut payload = json!({ "info": state_info(&env) });
        if a.render {
            payload["frame"] = frame_payload(&env);
        }
        self.env = Some(env);
        Ok(payload)
    }

    fn step(&mut self, raw: &Value) -> Result<Value, WireError> {
        let env = self.env.as_mut().ok_or_else(not_reset)?;
        let a: StepArgs = args(raw)?;
        let action = match a.action {
            ActionArg::Index(i) => Action::ALL.get(i).copied(),
            ActionArg::Name(n) => Action::from_name(&n),
        }
        .ok_or_else(|| WireError::new("BadRequest", "unknown action"))?;
        let StepResult { reward, done, info } = env.step(action)?;
        let mut payload = json!({
            "reward": reward.as_f64(),
            "done": done,
            "unlocked": info.unlocked.iter().map(|a| a.name()).collect::<Vec<_>>(),
            "info": state_info(env),
        });
        if a.render {
            payload["frame"] = frame_payload(env);
        }
        Ok(payload)
    }
}

fn not_reset() -> WireError {
    WireError::new("NotReset", "reset must come before step or render")
}
