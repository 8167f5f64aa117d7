//! Compact directed acyclic word graphs whose edge labels are intervals of a
//! text that is only reachable through random access.
//!
//! Node ids are dense and assigned in creation order (source first, sink
//! second). Each node's out-edges are kept sorted by the memoized first
//! character of their label, which makes branch selection a binary search
//! that never touches the text.

mod build;
mod io;

pub use build::{build_cdawg, CdawgBuilder, GrammarSource, TextSource};
pub use io::CDAWG_MAGIC;

use serde::Serialize;

use crate::access::{AccessCounters, RandomAccess};
use crate::error::{Error, Result};

pub type NodeId = u32;
pub type EdgeId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    /// Length of the longest string in the node's class, i.e. of the maximal
    /// repeat the node stands for (`n` for the sink).
    pub len: u64,
    /// Number of distinct paths from this node to the sink.
    pub count: u64,
    pub edges: Vec<EdgeId>,
}

/// An edge labelled by `T[start..=end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: NodeId,
    pub start: u64,
    pub end: u64,
    pub first_char: u8,
}

impl Edge {
    #[inline]
    pub fn label_len(&self) -> u64 {
        self.end - self.start + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CdawgStats {
    pub nodes: usize,
    pub edges: usize,
    pub source_out_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cdawg {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    source: NodeId,
    sink: NodeId,
    text_len: u64,
}

impl Cdawg {
    /// Assembles a CDAWG from raw tables, checking structural consistency:
    /// ids in range, every edge owned by exactly one node, labels inside the
    /// text and out-edges sorted with distinct first characters.
    pub fn from_parts(
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        source: NodeId,
        sink: NodeId,
        text_len: u64,
    ) -> Result<Cdawg> {
        let bad = |m: String| Err(Error::Format(m));
        if nodes.is_empty() {
            return bad("empty node table".into());
        }
        if source as usize >= nodes.len() || sink as usize >= nodes.len() {
            return bad("source or sink id out of range".into());
        }
        if !nodes[sink as usize].edges.is_empty() {
            return bad("sink has out-edges".into());
        }
        let mut owned = vec![false; edges.len()];
        for (v, node) in nodes.iter().enumerate() {
            let mut prev: Option<u8> = None;
            for &e in &node.edges {
                let Some(edge) = edges.get(e as usize) else {
                    return bad(format!("node {v} lists missing edge {e}"));
                };
                if std::mem::replace(&mut owned[e as usize], true) {
                    return bad(format!("edge {e} listed twice"));
                }
                if prev.is_some_and(|p| p >= edge.first_char) {
                    return bad(format!("out-edges of node {v} not sorted by distinct first character"));
                }
                prev = Some(edge.first_char);
            }
        }
        if let Some(e) = owned.iter().position(|&o| !o) {
            return bad(format!("edge {e} belongs to no node"));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.target as usize >= nodes.len() {
                return bad(format!("edge {i} targets missing node {}", e.target));
            }
            if e.start > e.end || e.end >= text_len {
                return bad(format!("edge {i} has invalid interval ({}, {})", e.start, e.end));
            }
        }
        Ok(Cdawg { nodes, edges, source, sink, text_len })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn text_len(&self) -> u64 {
        self.text_len
    }

    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.nodes[v as usize].edges.iter().map(move |&e| (e, &self.edges[e as usize]))
    }

    /// The out-edge of `v` whose label starts with `c`, found through the
    /// first-character memos alone.
    #[inline]
    pub fn find_edge(&self, v: NodeId, c: u8) -> Option<EdgeId> {
        let list = &self.nodes[v as usize].edges;
        list.binary_search_by_key(&c, |&e| self.edges[e as usize].first_char)
            .ok()
            .map(|i| list[i])
    }

    pub fn count(&self, v: NodeId) -> u64 {
        self.nodes[v as usize].count
    }

    pub fn stats(&self) -> CdawgStats {
        CdawgStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            source_out_degree: self.nodes[self.source as usize].edges.len(),
        }
    }

    /// Fills every node's path-to-sink count in one reverse topological pass.
    pub fn compute_counts(&mut self) -> Result<()> {
        const UNSEEN: u8 = 0;
        const OPEN: u8 = 1;
        const DONE: u8 = 2;
        let mut state = vec![UNSEEN; self.nodes.len()];
        let mut stack: Vec<(NodeId, usize)> = Vec::new();
        for root in 0..self.nodes.len() as NodeId {
            if state[root as usize] != UNSEEN {
                continue;
            }
            state[root as usize] = OPEN;
            stack.push((root, 0));
            while let Some(top) = stack.last_mut() {
                let (v, i) = *top;
                let node = &self.nodes[v as usize];
                if let Some(&e) = node.edges.get(i) {
                    top.1 += 1;
                    let w = self.edges[e as usize].target;
                    match state[w as usize] {
                        UNSEEN => {
                            state[w as usize] = OPEN;
                            stack.push((w, 0));
                        }
                        OPEN => return Err(Error::Cycle),
                        _ => {}
                    }
                    continue;
                }
                let count = if v == self.sink {
                    1
                } else {
                    node.edges
                        .iter()
                        .map(|&e| self.nodes[self.edges[e as usize].target as usize].count)
                        .fold(0u64, u64::saturating_add)
                };
                self.nodes[v as usize].count = count;
                state[v as usize] = DONE;
                stack.pop();
            }
        }
        Ok(())
    }

    /// Decodes an edge label through random access.
    pub fn edge_label(&self, e: EdgeId, ra: &RandomAccess, counters: &mut AccessCounters) -> Result<Vec<u8>> {
        let edge = &self.edges[e as usize];
        ra.access_range(edge.start, edge.end, counters)
    }

    /// Checks the semantic invariants that hold for any CDAWG of a
    /// `$`-terminated text, given that text. Intended for tests and the
    /// `stats` command on small inputs.
    pub fn verify(&self, text: &[u8]) -> std::result::Result<(), String> {
        let n = self.text_len;
        if text.len() as u64 != n {
            return Err(format!("text length {} != indexed length {n}", text.len()));
        }
        if self.node(self.source).len != 0 || self.node(self.sink).len != n {
            return Err("source/sink lengths wrong".into());
        }
        if self.count(self.sink) != 1 || self.count(self.source) != n {
            return Err(format!("count(source) = {} (want {n})", self.count(self.source)));
        }
        let mut longest_in = vec![0u64; self.nodes.len()];
        for (v, node) in self.nodes.iter().enumerate() {
            let mut sum = 0u64;
            for &e in &node.edges {
                let edge = &self.edges[e as usize];
                if text[edge.start as usize] != edge.first_char {
                    return Err(format!("edge {e} memo {} != T[{}]", edge.first_char, edge.start));
                }
                let w = edge.target as usize;
                let reach = node.len + edge.label_len();
                if self.nodes[w].len < reach {
                    return Err(format!("edge {e}: len({w}) < len({v}) + label"));
                }
                longest_in[w] = longest_in[w].max(reach);
                sum += self.nodes[w].count;
            }
            if v as NodeId != self.sink && sum != node.count {
                return Err(format!("count({v}) = {} but out-edges sum to {sum}", node.count));
            }
        }
        for (v, node) in self.nodes.iter().enumerate() {
            if v as NodeId != self.source && longest_in[v] != node.len {
                return Err(format!("len({v}) = {} but longest incoming path gives {}", node.len, longest_in[v]));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Cdawg {
        // CDAWG of "a$": source -a$-> sink, source -$-> sink.
        let nodes = vec![
            Node { len: 0, count: 0, edges: vec![1, 0] },
            Node { len: 2, count: 0, edges: vec![] },
        ];
        let edges = vec![
            Edge { target: 1, start: 0, end: 1, first_char: b'a' },
            Edge { target: 1, start: 1, end: 1, first_char: b'$' },
        ];
        Cdawg::from_parts(nodes, edges, 0, 1, 2).unwrap()
    }

    #[test]
    fn counts_on_tiny() {
        let mut c = tiny();
        c.compute_counts().unwrap();
        assert_eq!(c.count(0), 2);
        assert_eq!(c.count(1), 1);
        assert_eq!(c.stats(), CdawgStats { nodes: 2, edges: 2, source_out_degree: 2 });
        assert_eq!(c.find_edge(0, b'a'), Some(0));
        assert_eq!(c.find_edge(0, b'$'), Some(1));
        assert_eq!(c.find_edge(0, b'b'), None);
        c.verify(b"a$").unwrap();
    }

    #[test]
    fn cycle_is_reported() {
        let nodes = vec![
            Node { len: 0, count: 0, edges: vec![0] },
            Node { len: 1, count: 0, edges: vec![1] },
            Node { len: 3, count: 0, edges: vec![] },
        ];
        let edges = vec![
            Edge { target: 1, start: 0, end: 0, first_char: b'a' },
            Edge { target: 0, start: 1, end: 1, first_char: b'b' },
        ];
        let mut c = Cdawg::from_parts(nodes, edges, 0, 2, 3).unwrap();
        assert!(matches!(c.compute_counts(), Err(Error::Cycle)));
    }

    #[test]
    fn structural_checks() {
        let node = |edges: Vec<EdgeId>| Node { len: 0, count: 0, edges };
        let edge = |c: u8| Edge { target: 1, start: 0, end: 0, first_char: c };
        assert!(Cdawg::from_parts(vec![], vec![], 0, 0, 1).is_err());
        // unsorted out-edges
        assert!(Cdawg::from_parts(vec![node(vec![0, 1]), node(vec![])], vec![edge(b'b'), edge(b'a')], 0, 1, 2).is_err());
        // orphan edge
        assert!(Cdawg::from_parts(vec![node(vec![0]), node(vec![])], vec![edge(b'a'), edge(b'b')], 0, 1, 2).is_err());
        // label past the end of the text
        let long = Edge { target: 1, start: 0, end: 5, first_char: b'a' };
        assert!(Cdawg::from_parts(vec![node(vec![0]), node(vec![])], vec![long], 0, 1, 2).is_err());
    }
}
