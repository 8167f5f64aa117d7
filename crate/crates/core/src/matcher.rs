//! Exists / count / locate over a CDAWG whose labels live in a grammar.
//!
//! Branches are picked by the first-character memo alone, so the only
//! grammar traffic is one lazy range read per edge for the label characters
//! after the first. Once the pattern is consumed, counting reads a stored
//! node count and locating walks stored intervals; neither touches the
//! grammar.

use crate::access::{AccessCounters, RandomAccess};
use crate::cdawg::{Cdawg, EdgeId, NodeId};
use crate::error::{Error, Result};

/// Where a pattern ends inside the CDAWG.
///
/// Matching consumes at least one character, so the point always lies on an
/// edge with `0 < offset <= label length`; `offset == label length` means it
/// sits exactly on the edge's target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchPoint {
    pub edge: Option<EdgeId>,
    /// Characters consumed on `edge`.
    pub offset: u64,
    /// Source node of `edge`, the last node passed.
    pub node: NodeId,
    /// `m` on success; `matched_len - offset` characters were matched on
    /// reaching `node`.
    pub matched_len: u64,
}

/// Start positions of a pattern, strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Occurrences {
    pub positions: Vec<u64>,
}

impl Occurrences {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Matcher<'a> {
    cdawg: &'a Cdawg,
    ra: &'a RandomAccess,
}

impl<'a> Matcher<'a> {
    pub fn new(cdawg: &'a Cdawg, ra: &'a RandomAccess) -> Matcher<'a> {
        Matcher { cdawg, ra }
    }

    pub fn cdawg(&self) -> &'a Cdawg {
        self.cdawg
    }

    pub fn random_access(&self) -> &'a RandomAccess {
        self.ra
    }

    /// Walks `pattern` from the source. Returns `None` as soon as a
    /// character fails to match.
    pub fn find_point(&self, pattern: &[u8], counters: &mut AccessCounters) -> Result<Option<MatchPoint>> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let m = pattern.len() as u64;
        let mut v = self.cdawg.source();
        let mut k = 0u64;
        loop {
            let Some(e) = self.cdawg.find_edge(v, pattern[k as usize]) else {
                return Ok(None);
            };
            let edge = *self.cdawg.edge(e);
            let take = edge.label_len().min(m - k);
            if take > 1 {
                let want = &pattern[k as usize + 1..(k + take) as usize];
                let mut got = self.ra.range(edge.start + 1, edge.start + take - 1, counters)?;
                for &p in want {
                    if got.next() != Some(p) {
                        return Ok(None);
                    }
                }
            }
            k += take;
            if k == m {
                return Ok(Some(MatchPoint { edge: Some(e), offset: take, node: v, matched_len: m }));
            }
            v = edge.target;
        }
    }

    pub fn exists(&self, pattern: &[u8], counters: &mut AccessCounters) -> Result<bool> {
        Ok(self.find_point(pattern, counters)?.is_some())
    }

    pub fn count(&self, pattern: &[u8], counters: &mut AccessCounters) -> Result<u64> {
        Ok(match self.find_point(pattern, counters)? {
            Some(point) => self.count_at(point),
            None => 0,
        })
    }

    /// Occurrence count at a match point: the paths from its forward node.
    pub fn count_at(&self, point: MatchPoint) -> u64 {
        match point.edge {
            Some(e) => self.cdawg.count(self.cdawg.edge(e).target),
            None => self.cdawg.count(point.node),
        }
    }

    pub fn locate(&self, pattern: &[u8], counters: &mut AccessCounters) -> Result<Occurrences> {
        Ok(match self.find_point(pattern, counters)? {
            Some(point) => self.locate_at(point),
            None => Occurrences::default(),
        })
    }

    /// Every occurrence below a match point, ascending.
    pub fn locate_at(&self, point: MatchPoint) -> Occurrences {
        let mut positions = self.positions_at(point);
        positions.sort_unstable();
        Occurrences { positions }
    }

    /// Occurrences below a match point in traversal order. Each path to the
    /// sink spelling `r` more characters is the suffix starting at
    /// `n - m - r`.
    pub fn positions_at(&self, point: MatchPoint) -> Vec<u64> {
        let n = self.cdawg.text_len();
        let m = point.matched_len;
        let (start, rest) = match point.edge {
            Some(e) => {
                let edge = self.cdawg.edge(e);
                (edge.target, edge.label_len() - point.offset)
            }
            None => (point.node, 0),
        };
        let mut positions = Vec::with_capacity(self.cdawg.count(start) as usize);
        let mut stack = vec![(start, rest)];
        while let Some((v, r)) = stack.pop() {
            if v == self.cdawg.sink() {
                positions.push(n - m - r);
                continue;
            }
            for (_, edge) in self.cdawg.out_edges(v) {
                stack.push((edge.target, r + edge.label_len()));
            }
        }
        positions
    }
}
