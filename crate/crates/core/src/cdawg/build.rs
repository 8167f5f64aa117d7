//! On-line CDAWG construction.
//!
//! Characters are appended one at a time; after each append the structure is
//! the CDAWG of the prefix read so far (with edges into the sink left open,
//! growing implicitly with the text). The procedure follows the on-line
//! algorithm of Inenaga et al.: a Ukkonen-style active point kept as a
//! canonical reference pair `(node, k)` meaning `str(node) T[k..p]`, edge
//! splitting, redirection of edges that reach an already-split node, and
//! separation of non-solid nodes.
//!
//! The text itself is never stored. Every look-back into already-consumed
//! text goes through a [`TextSource`]; over a grammar that is a random
//! access served by a FIFO cache. Branch selection uses first-character
//! memos stored on the edges.

use super::{Cdawg, Edge, EdgeId, Node, NodeId};
use crate::access::{AccessCounters, FifoCache, RandomAccess};
use crate::error::{Error, Result};
use crate::slg::TERMINATOR;

/// Random access to characters the builder has already consumed.
pub trait TextSource {
    fn char_at(&mut self, pos: u64) -> Result<u8>;
}

impl TextSource for &[u8] {
    fn char_at(&mut self, pos: u64) -> Result<u8> {
        self.get(pos as usize).copied().ok_or(Error::OutOfBounds { start: pos, end: pos, len: self.len() as u64 })
    }
}

/// Grammar-backed text: single characters go through the FIFO cache, misses
/// become one-character range accesses.
pub struct GrammarSource<'a> {
    pub ra: &'a RandomAccess,
    pub cache: &'a mut FifoCache,
    pub counters: &'a mut AccessCounters,
}

impl TextSource for GrammarSource<'_> {
    fn char_at(&mut self, pos: u64) -> Result<u8> {
        self.ra.access_char(pos, self.cache, self.counters)
    }
}

const SOURCE: NodeId = 0;
const SINK: NodeId = 1;
/// Auxiliary node below the source with an edge for every character.
const BOTTOM: NodeId = NodeId::MAX;
/// End marker of edges into the sink; they end at the current position.
const OPEN: u64 = u64::MAX;

#[derive(Clone, Debug)]
struct BuildNode {
    len: i64,
    suffix: NodeId,
    edges: Vec<EdgeId>,
}

/// Incremental CDAWG construction over a [`TextSource`].
#[derive(Clone, Debug)]
pub struct CdawgBuilder<S> {
    text: S,
    nodes: Vec<BuildNode>,
    edges: Vec<Edge>,
    // Active point: canonical reference pair for `str(node) T[k..pos-1]`.
    node: NodeId,
    k: i64,
    /// Number of characters consumed; also the index of the one being added.
    pos: u64,
    current: u8,
    probe: Option<(u64, u8)>,
    terminators: u64,
}

impl<S: TextSource> CdawgBuilder<S> {
    pub fn new(text: S) -> CdawgBuilder<S> {
        let nodes = vec![
            BuildNode { len: 0, suffix: BOTTOM, edges: Vec::new() },
            BuildNode { len: 0, suffix: BOTTOM, edges: Vec::new() },
        ];
        CdawgBuilder {
            text,
            nodes,
            edges: Vec::new(),
            node: SOURCE,
            k: 0,
            pos: 0,
            current: 0,
            probe: None,
            terminators: 0,
        }
    }

    /// Number of characters appended so far.
    pub fn len(&self) -> u64 {
        self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.pos == 0
    }

    pub fn text_source(&self) -> &S {
        &self.text
    }

    /// Appends `T[len()] = c`.
    pub fn push(&mut self, c: u8) -> Result<()> {
        self.current = c;
        self.update(c)?;
        self.pos += 1;
        if c == TERMINATOR {
            self.terminators += 1;
        }
        Ok(())
    }

    /// Closes the open edges and returns the finished CDAWG with path counts.
    /// The text must have ended with its only `$`.
    pub fn finish(self) -> Result<Cdawg> {
        if self.pos == 0 || self.current != TERMINATOR || self.terminators != 1 {
            return Err(Error::Terminator(format!(
                "stream of {} characters must end with exactly one '$' (saw {})",
                self.pos, self.terminators
            )));
        }
        let n = self.pos;
        let nodes = self
            .nodes
            .into_iter()
            .enumerate()
            .map(|(v, node)| Node {
                len: if v as NodeId == SINK { n } else { node.len as u64 },
                count: 0,
                edges: node.edges,
            })
            .collect();
        let edges = self
            .edges
            .into_iter()
            .map(|e| Edge { end: if e.end == OPEN { n - 1 } else { e.end }, ..e })
            .collect();
        let mut cdawg = Cdawg::from_parts(nodes, edges, SOURCE, SINK, n)?;
        cdawg.compute_counts()?;
        Ok(cdawg)
    }

    #[inline]
    fn text_at(&mut self, pos: i64) -> Result<u8> {
        let pos = pos as u64;
        debug_assert!(pos <= self.pos, "look-ahead past the current character");
        if pos == self.pos {
            return Ok(self.current);
        }
        if let Some((p, c)) = self.probe {
            if p == pos {
                return Ok(c);
            }
        }
        let c = self.text.char_at(pos)?;
        self.probe = Some((pos, c));
        Ok(c)
    }

    #[inline]
    fn len_of(&self, v: NodeId) -> i64 {
        if v == BOTTOM {
            -1
        } else {
            self.nodes[v as usize].len
        }
    }

    #[inline]
    fn suffix(&self, v: NodeId) -> NodeId {
        self.nodes[v as usize].suffix
    }

    #[inline]
    fn edge_end(&self, e: &Edge) -> i64 {
        if e.end == OPEN {
            self.pos as i64
        } else {
            e.end as i64
        }
    }

    fn find_edge(&self, v: NodeId, c: u8) -> Option<EdgeId> {
        let list = &self.nodes[v as usize].edges;
        list.binary_search_by_key(&c, |&e| self.edges[e as usize].first_char)
            .ok()
            .map(|i| list[i])
    }

    /// The out-edge of `v` starting with `T[k]`; it must exist.
    fn edge_from(&mut self, v: NodeId, k: i64) -> Result<EdgeId> {
        let c = self.text_at(k)?;
        Ok(self.find_edge(v, c).expect("active point lies on an existing edge"))
    }

    fn add_edge(&mut self, from: NodeId, edge: Edge) -> EdgeId {
        let id = self.edges.len() as EdgeId;
        self.edges.push(edge);
        let c = edge.first_char;
        let edges = &self.edges;
        let list = &mut self.nodes[from as usize].edges;
        let at = list.partition_point(|&e| edges[e as usize].first_char < c);
        list.insert(at, id);
        id
    }

    fn add_node(&mut self, len: i64) -> NodeId {
        self.nodes.push(BuildNode { len, suffix: BOTTOM, edges: Vec::new() });
        (self.nodes.len() - 1) as NodeId
    }

    /// Walks down from `v` along `T[k..=p]` as far as whole edges allow.
    fn canonize(&mut self, mut v: NodeId, mut k: i64, p: i64) -> Result<(NodeId, i64)> {
        if k > p {
            return Ok((v, k));
        }
        if v == BOTTOM {
            v = SOURCE;
            k += 1;
            if k > p {
                return Ok((v, k));
            }
        }
        loop {
            let id = self.edge_from(v, k)?;
            let e = self.edges[id as usize];
            let span = self.edge_end(&e) - e.start as i64;
            if span > p - k {
                return Ok((v, k));
            }
            k += span + 1;
            v = e.target;
            if k > p {
                return Ok((v, k));
            }
        }
    }

    /// Whether `str(v) T[k..=p] c` already occurs in the text.
    fn check_end_point(&mut self, v: NodeId, k: i64, p: i64, c: u8) -> Result<bool> {
        if k <= p {
            let id = self.edge_from(v, k)?;
            let e = self.edges[id as usize];
            let next = e.start as i64 + p - k + 1;
            Ok(self.text_at(next)? == c)
        } else if v == BOTTOM {
            Ok(true)
        } else {
            Ok(self.find_edge(v, c).is_some())
        }
    }

    /// Splits edge `e` (leaving `v` along `T[k..=p]`) after `p - k + 1`
    /// characters and returns the new middle node.
    fn split_edge(&mut self, e: EdgeId, v: NodeId, k: i64, p: i64) -> Result<NodeId> {
        let old = self.edges[e as usize];
        let cut = old.start + (p - k) as u64;
        let r = self.add_node(self.len_of(v) + p - k + 1);
        let first_char = self.text_at(cut as i64 + 1)?;
        self.edges[e as usize] = Edge { target: r, end: cut, ..old };
        self.add_edge(r, Edge { target: old.target, start: cut + 1, end: old.end, first_char });
        Ok(r)
    }

    fn redirect_edge(&mut self, e: EdgeId, k: i64, p: i64, r: NodeId) {
        let old = &mut self.edges[e as usize];
        old.end = old.start + (p - k) as u64;
        old.target = r;
    }

    fn update(&mut self, c: u8) -> Result<()> {
        let p = self.pos as i64;
        let (mut v, mut k) = (self.node, self.k);
        let mut last_created: Option<NodeId> = None;
        let mut split_target: Option<NodeId> = None;
        let mut r = SOURCE;
        while !self.check_end_point(v, k, p - 1, c)? {
            if k < p {
                let e = self.edge_from(v, k)?;
                let ext = self.edges[e as usize].target;
                if split_target == Some(ext) {
                    // Same right context as the node just split off: merge.
                    self.redirect_edge(e, k, p - 1, r);
                    (v, k) = self.canonize(self.suffix(v), k, p - 1)?;
                    continue;
                }
                split_target = Some(ext);
                r = self.split_edge(e, v, k, p - 1)?;
            } else {
                r = v;
            }
            self.add_edge(r, Edge { target: SINK, start: p as u64, end: OPEN, first_char: c });
            if let Some(o) = last_created {
                self.nodes[o as usize].suffix = r;
            }
            last_created = Some(r);
            (v, k) = self.canonize(self.suffix(v), k, p - 1)?;
        }
        if let Some(o) = last_created {
            self.nodes[o as usize].suffix = v;
        }
        (self.node, self.k) = self.separate_node(v, k, p)?;
        Ok(())
    }

    /// If the new active point lands on a node through a non-solid edge,
    /// splits that node so its class only keeps strings that are really
    /// equivalent.
    fn separate_node(&mut self, v: NodeId, k: i64, p: i64) -> Result<(NodeId, i64)> {
        let (target, k2) = self.canonize(v, k, p)?;
        if k2 <= p {
            return Ok((target, k2));
        }
        let depth = self.len_of(v) + p - k + 1;
        if self.len_of(target) == depth {
            return Ok((target, k2));
        }
        let copy = self.add_node(depth);
        for e in self.nodes[target as usize].edges.clone() {
            let edge = self.edges[e as usize];
            self.add_edge(copy, edge);
        }
        self.nodes[copy as usize].suffix = self.suffix(target);
        self.nodes[target as usize].suffix = copy;
        let (mut v, mut k) = (v, k);
        loop {
            let e = self.edge_from(v, k)?;
            let edge = &mut self.edges[e as usize];
            edge.start = k as u64;
            edge.end = p as u64;
            edge.target = copy;
            (v, k) = self.canonize(self.suffix(v), k, p - 1)?;
            if self.canonize(v, k, p)? != (target, k2) {
                break;
            }
        }
        Ok((copy, p + 1))
    }
}

/// Builds the CDAWG of the text a grammar produces, decoding the grammar as
/// construction proceeds. All look-backs go through `cache` and are counted
/// in `counters`.
pub fn build_cdawg(ra: &RandomAccess, cache: &mut FifoCache, counters: &mut AccessCounters) -> Result<Cdawg> {
    let mut builder = CdawgBuilder::new(GrammarSource { ra, cache, counters });
    for c in ra.grammar().expand() {
        builder.push(c)?;
    }
    builder.finish()
}
