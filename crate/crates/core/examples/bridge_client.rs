//! Starts a TCP bridge in-process and drives it like an external agent would.
//!
//! `cargo run --example bridge_client -- [steps]`

use crafter_foundry::bridge::{BridgeClient, TcpServer};
use crafter_foundry::EnvConfig;
use serde_json::{json, Value};

fn main() -> std::io::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let server = TcpServer::bind("127.0.0.1:0", EnvConfig::default())?;
    let addr = server.local_addr()?;
    server.spawn();

    let mut client = BridgeClient::connect(addr)?;
    let spec = client.call("spec", Value::Null)?;
    let actions = spec.payload.unwrap()["actions"].as_array().cloned().unwrap_or_default();
    println!("{} actions: {}", actions.len(), Value::Array(actions.clone()));

    client.call("reset", json!({ "seed": 1 }))?;
    let mut total = 0.0;
    for i in 0..steps {
        let action = &actions[[1, 2, 3, 4, 5][i % 5]];
        let r = client.call("step", json!({ "action": action }))?;
        let p = r.payload.expect("step payload");
        total += p["reward"].as_f64().unwrap_or(0.0);
        if p["done"].as_bool() == Some(true) {
            break;
        }
    }
    let frame = client.call("render", Value::Null)?.payload.unwrap();
    println!("return {total:.1}, frame {}x{} ({} base64 chars)", frame["width"], frame["height"], frame["data"].as_str().map_or(0, str::len));
    client.call("close", Value::Null)?;
    Ok(())
}
