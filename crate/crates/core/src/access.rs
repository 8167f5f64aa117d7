//! Random access into the text produced by a grammar.
//!
//! The start rule's symbols are indexed by the text position where each one
//! begins. A query binary-searches that index for the symbol covering the
//! first requested position, descends its derivation tree by expansion
//! lengths (whole subtrees left of the position are skipped, never decoded),
//! and then streams characters until the range is exhausted.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::slg::{Expand, Grammar, Symbol};

/// Default number of entries in the single-character FIFO cache.
pub const DEFAULT_CACHE_CAPACITY: usize = 65_536;

/// Start positions of the start rule's symbols, in text order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionIndex {
    positions: Vec<u64>,
    symbols: Vec<Symbol>,
    text_len: u64,
}

impl PositionIndex {
    /// Prefix sums over the memoized expansion lengths: O(|R[S]|) time once
    /// the grammar is loaded.
    pub fn build(grammar: &Grammar) -> PositionIndex {
        let start = grammar.start_rule();
        let mut positions = Vec::with_capacity(start.len());
        let mut at = 0u64;
        for &s in start {
            positions.push(at);
            at += grammar.expansion_length(s);
        }
        PositionIndex {
            positions,
            symbols: start.to_vec(),
            text_len: at,
        }
    }

    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn text_len(&self) -> u64 {
        self.text_len
    }

    /// Index `k` of the start-rule symbol whose expansion covers position `i`
    /// (the largest `k` with `positions[k] <= i`). `i` must be `< n`.
    #[inline]
    pub fn covering(&self, i: u64) -> usize {
        debug_assert!(i < self.text_len);
        self.positions.partition_point(|&p| p <= i) - 1
    }
}

/// Instrumentation for one query or one construction run.
///
/// `ra_calls` counts range accesses issued against the grammar (a cache hit
/// is not one); `chars_decoded` counts characters materialized from it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AccessCounters {
    pub ra_calls: u64,
    pub chars_decoded: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

impl AccessCounters {
    pub fn reset(&mut self) {
        *self = AccessCounters::default();
    }

    pub fn hit_rate(&self) -> f64 {
        let total = self.cache_hits + self.cache_misses;
        if total == 0 {
            0.0
        } else {
            self.cache_hits as f64 / total as f64
        }
    }
}

/// Single-character cache with first-in-first-out eviction: once full, the
/// oldest inserted entry goes, however recently it was hit.
#[derive(Clone, Debug)]
pub struct FifoCache {
    capacity: usize,
    order: VecDeque<u64>,
    entries: HashMap<u64, u8>,
}

impl FifoCache {
    pub fn new(capacity: usize) -> FifoCache {
        FifoCache {
            capacity,
            order: VecDeque::with_capacity(capacity.min(1 << 16)),
            entries: HashMap::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn get(&self, pos: u64) -> Option<u8> {
        self.entries.get(&pos).copied()
    }

    pub fn insert(&mut self, pos: u64, c: u8) {
        if self.capacity == 0 || self.entries.contains_key(&pos) {
            return;
        }
        if self.order.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.entries.remove(&old);
            }
        }
        self.order.push_back(pos);
        self.entries.insert(pos, c);
    }
}

impl Default for FifoCache {
    fn default() -> Self {
        FifoCache::new(DEFAULT_CACHE_CAPACITY)
    }
}

/// A grammar together with its position index: the text `T`, available only
/// through random access.
#[derive(Clone, Debug)]
pub struct RandomAccess {
    grammar: Grammar,
    index: PositionIndex,
}

impl RandomAccess {
    pub fn new(grammar: Grammar) -> RandomAccess {
        let index = PositionIndex::build(&grammar);
        RandomAccess { grammar, index }
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn index(&self) -> &PositionIndex {
        &self.index
    }

    pub fn into_grammar(self) -> Grammar {
        self.grammar
    }

    pub fn len(&self) -> u64 {
        self.index.text_len
    }

    pub fn is_empty(&self) -> bool {
        self.index.text_len == 0
    }

    fn check(&self, i: u64, j: u64) -> Result<()> {
        if i > j || j >= self.len() {
            return Err(Error::OutOfBounds { start: i, end: j, len: self.len() });
        }
        Ok(())
    }

    /// Lazily streams `T[i..=j]`. Counts one access up front and each
    /// character as it is pulled, so a consumer that stops at a mismatch only
    /// pays for what it read.
    pub fn range<'a>(&'a self, i: u64, j: u64, counters: &'a mut AccessCounters) -> Result<Range<'a>> {
        self.check(i, j)?;
        counters.ra_calls += 1;
        let k = self.index.covering(i);
        let inner = Expand::new(&self.grammar, k, i - self.index.positions[k], j - i + 1);
        Ok(Range { inner, counters })
    }

    /// `T[i..=j]`, inclusive on both ends.
    pub fn access_range(&self, i: u64, j: u64, counters: &mut AccessCounters) -> Result<Vec<u8>> {
        Ok(self.range(i, j, counters)?.collect())
    }

    /// `T[i]`, served from `cache` when possible.
    pub fn access_char(&self, i: u64, cache: &mut FifoCache, counters: &mut AccessCounters) -> Result<u8> {
        if let Some(c) = cache.get(i) {
            counters.cache_hits += 1;
            return Ok(c);
        }
        self.check(i, i)?;
        counters.cache_misses += 1;
        let c = self.range(i, i, counters)?.next().expect("non-empty range");
        cache.insert(i, c);
        Ok(c)
    }
}

/// Iterator returned by [`RandomAccess::range`].
pub struct Range<'a> {
    inner: Expand<'a>,
    counters: &'a mut AccessCounters,
}

impl Iterator for Range<'_> {
    type Item = u8;

    #[inline]
    fn next(&mut self) -> Option<u8> {
        let c = self.inner.next()?;
        self.counters.chars_decoded += 1;
        Some(c)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.inner.size_hint()
    }
}
