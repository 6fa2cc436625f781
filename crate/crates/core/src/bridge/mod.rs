//! Length-prefixed JSON protocol for driving environments from other processes.

mod client;
mod protocol;
mod server;
mod session;

pub use client::BridgeClient;
pub use protocol::{read_frame, write_frame, write_json, Request, Response, WireError, MAX_FRAME_BYTES};
pub use server::{serve_connection, serve_stdio, TcpServer};
pub use session::{frame_payload, spec_payload, state_info, Session};
