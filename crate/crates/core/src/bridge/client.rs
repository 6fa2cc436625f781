use std::io::{self, BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};

use serde_json::{json, Value};

use super::protocol::{read_frame, write_json, Request, Response};

/// Minimal blocking client, mostly for tests and examples.
pub struct BridgeClient {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
    next_id: u64,
}

impl BridgeClient {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<BridgeClient> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(BridgeClient { reader: BufReader::new(stream.try_clone()?), writer: BufWriter::new(stream), next_id: 0 })
    }

    pub fn call(&mut self, op: &str, args: Value) -> io::Result<Response> {
        self.next_id += 1;
        write_json(&mut self.writer, &Request { op: op.to_string(), id: json!(self.next_id), args })?;
        let body = read_frame(&mut self.reader)?.ok_or_else(|| io::Error::from(io::ErrorKind::UnexpectedEof))?;
        serde_json::from_slice(&body).map_err(io::Error::other)
    }
}
