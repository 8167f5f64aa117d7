//! The `CDG1` file layout, all integers little-endian:
//!
//! ```text
//! magic "CDG1" | u32 version = 1 | u64 n | u32 node_count | u32 edge_count
//! | u32 source_id | u32 sink_id
//! node_count x { u64 len | u64 count | u32 out_degree | out_degree x u32 edge_id }
//! edge_count x { u32 target | u64 start | u64 end | u8 first_char }
//! ```
//!
//! Suffix links are construction-time scaffolding and are not stored.

use std::io::{Read, Write};

use super::{Cdawg, Edge, Node};
use crate::error::{Error, Result};

pub const CDAWG_MAGIC: [u8; 4] = *b"CDG1";
const VERSION: u32 = 1;

impl Cdawg {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + self.nodes.len() * 24 + self.edges.len() * 25);
        out.extend_from_slice(&CDAWG_MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.text_len.to_le_bytes());
        out.extend_from_slice(&(self.nodes.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.edges.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.source.to_le_bytes());
        out.extend_from_slice(&self.sink.to_le_bytes());
        for node in &self.nodes {
            out.extend_from_slice(&node.len.to_le_bytes());
            out.extend_from_slice(&node.count.to_le_bytes());
            out.extend_from_slice(&(node.edges.len() as u32).to_le_bytes());
            for e in &node.edges {
                out.extend_from_slice(&e.to_le_bytes());
            }
        }
        for e in &self.edges {
            out.extend_from_slice(&e.target.to_le_bytes());
            out.extend_from_slice(&e.start.to_le_bytes());
            out.extend_from_slice(&e.end.to_le_bytes());
            out.push(e.first_char);
        }
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Cdawg> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Cdawg::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Cdawg> {
        if !bytes.starts_with(&CDAWG_MAGIC) {
            return Err(Error::Format("bad magic, expected CDG1".into()));
        }
        let mut r = Cursor { bytes, pos: 4 };
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Version { found: version, expected: VERSION });
        }
        let text_len = r.u64()?;
        let node_count = r.u32()? as usize;
        let edge_count = r.u32()? as usize;
        let source = r.u32()?;
        let sink = r.u32()?;
        if node_count == 0 {
            return Err(Error::Format("empty node table".into()));
        }
        // Minimum record sizes bound the allocations below.
        if node_count.saturating_mul(20).saturating_add(edge_count.saturating_mul(25)) > r.remaining() {
            return Err(Error::Format("declared table sizes exceed file size".into()));
        }
        let mut nodes = Vec::with_capacity(node_count);
        for _ in 0..node_count {
            let len = r.u64()?;
            let count = r.u64()?;
            let degree = r.u32()? as usize;
            if degree.saturating_mul(4) > r.remaining() {
                return Err(Error::Format("out-degree exceeds file size".into()));
            }
            let edges = (0..degree).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            nodes.push(Node { len, count, edges });
        }
        let mut edges = Vec::with_capacity(edge_count);
        for _ in 0..edge_count {
            let target = r.u32()?;
            let start = r.u64()?;
            let end = r.u64()?;
            let first_char = r.u8()?;
            edges.push(Edge { target, start, end, first_char });
        }
        if r.remaining() != 0 {
            return Err(Error::Format(format!("{} trailing bytes", r.remaining())));
        }
        Cdawg::from_parts(nodes, edges, source, sink, text_len)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let chunk = self
            .bytes
            .get(self.pos..self.pos + N)
            .ok_or_else(|| Error::Format(format!("truncated CDAWG at byte {}", self.pos)))?;
        self.pos += N;
        Ok(chunk.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}
