use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::thread::{self, JoinHandle};

use serde_json::Value;

use super::protocol::{read_frame, write_json, Request, Response, WireError};
use super::session::Session;
use crate::mechanics::EnvConfig;

/// Serves requests from one byte stream until close, end of stream or a framing error.
pub fn serve_connection(reader: impl Read, writer: impl Write, config: EnvConfig) -> io::Result<()> {
    let mut r = BufReader::new(reader);
    let mut w = BufWriter::new(writer);
    let mut session = Session::new(config);
    while let Some(body) = read_frame(&mut r)? {
        let (resp, close) = match serde_json::from_slice::<Request>(&body) {
            Ok(req) => session.handle(&req),
            Err(e) => {
                // Salvage the id when the body is JSON but not a valid request.
                let id = serde_json::from_slice::<Value>(&body)
                    .ok()
                    .and_then(|v| v.get("id").cloned())
                    .unwrap_or(Value::Null);
                (Response::err(id, WireError::new("BadRequest", e.to_string())), false)
            }
        };
        write_json(&mut w, &resp)?;
        if close {
            break;
        }
    }
    Ok(())
}

pub fn serve_stdio(config: EnvConfig) -> io::Result<()> {
    serve_connection(io::stdin().lock(), io::stdout().lock(), config)
}

/// A bound TCP listener; each accepted connection gets its own thread and environment.
pub struct TcpServer {
    listener: TcpListener,
    config: EnvConfig,
}

impl TcpServer {
    pub fn bind(addr: impl ToSocketAddrs, config: EnvConfig) -> io::Result<TcpServer> {
        Ok(TcpServer { listener: TcpListener::bind(addr)?, config })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts forever.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            let config = self.config.clone();
            thread::spawn(move || handle_tcp(stream, config));
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> JoinHandle<io::Result<()>> {
        thread::spawn(move || self.run())
    }
}

fn handle_tcp(stream: TcpStream, config: EnvConfig) {
    let _ = stream.set_nodelay(true);
    if let Ok(read_half) = stream.try_clone() {
        let _ = serve_connection(read_half, stream, config);
    }
}
