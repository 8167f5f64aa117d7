//! Re-Pair grammar compression.
//!
//! The working sequence is a doubly linked list over the original positions.
//! Each adjacent pair keeps a list of positions where it was seen; entries go
//! stale as neighbours are rewritten and are filtered when the pair is
//! examined. A max-heap keyed by (list length, pair) orders the candidates.
//! List length only over-estimates the true count, so a popped pair whose
//! recount matches its key is the most frequent one; otherwise it is
//! re-queued with the recount.
//!
//! Runs count non-overlapping occurrences left to right. Ties go to the
//! numerically smallest (left, right) pair. Pair rules are numbered in
//! creation order and the start rule comes last.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::Result;
use crate::slg::{terminate, Grammar, Symbol};

pub type Pair = (u32, u32);

const NONE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX;

/// Compresses `raw` after applying the terminator policy.
pub fn repair_compress(raw: &[u8]) -> Result<Grammar> {
    let mut rp = RePair::new(&terminate(raw)?);
    while rp.step().is_some() {}
    rp.finish()
}

/// Pair occurrence lists plus the priority queue over them.
#[derive(Clone, Debug, Default)]
pub struct PairTable {
    occ: HashMap<Pair, Vec<u32>>,
    heap: BinaryHeap<(usize, Reverse<Pair>)>,
}

/// A Re-Pair run that can be advanced one replacement at a time.
#[derive(Clone, Debug)]
pub struct RePair {
    seq: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    head: u32,
    table: PairTable,
    rules: Vec<Pair>,
}

impl RePair {
    pub fn new(text: &[u8]) -> RePair {
        let n = text.len();
        assert!(n < NONE as usize, "text too long");
        let seq: Vec<u32> = text.iter().map(|&b| b as u32).collect();
        let next = (0..n as u32).map(|i| if i as usize + 1 < n { i + 1 } else { NONE }).collect();
        let prev = (0..n as u32).map(|i| if i == 0 { NONE } else { i - 1 }).collect();
        let mut table = PairTable::default();
        for i in 0..n.saturating_sub(1) {
            table.occ.entry((seq[i], seq[i + 1])).or_default().push(i as u32);
        }
        for (&pair, list) in &table.occ {
            if list.len() >= 2 {
                table.heap.push((list.len(), Reverse(pair)));
            }
        }
        RePair { seq, next, prev, head: if n == 0 { NONE } else { 0 }, table, rules: Vec::new() }
    }

    /// Replaces the most frequent pair, if one occurs at least twice.
    /// Returns the pair and how many occurrences were replaced.
    pub fn step(&mut self) -> Option<(Pair, usize)> {
        while let Some((key, Reverse(pair))) = self.table.heap.pop() {
            let Some(list) = self.table.occ.remove(&pair) else { continue };
            let valid = self.valid_positions(pair, list);
            let chosen = self.non_overlapping(&valid);
            if chosen.len() < 2 || chosen.len() != key {
                if chosen.len() >= 2 {
                    self.table.heap.push((chosen.len(), Reverse(pair)));
                }
                if !valid.is_empty() {
                    self.table.occ.insert(pair, valid);
                }
                continue;
            }
            self.replace(pair, &chosen);
            return Some((pair, chosen.len()));
        }
        None
    }

    /// Recorded positions where `pair` still occurs, ascending.
    fn valid_positions(&self, (a, b): Pair, mut list: Vec<u32>) -> Vec<u32> {
        list.sort_unstable();
        list.dedup();
        list.retain(|&i| {
            let j = self.next[i as usize];
            self.seq[i as usize] == a && j != NONE && self.seq[j as usize] == b
        });
        list
    }

    /// Greedy left-to-right selection dropping occurrences that overlap the
    /// previously selected one (only possible inside runs).
    fn non_overlapping(&self, valid: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::with_capacity(valid.len());
        for &i in valid {
            if out.last().is_some_and(|&p| self.next[p as usize] == i) {
                continue;
            }
            out.push(i);
        }
        out
    }

    fn replace(&mut self, pair: Pair, positions: &[u32]) {
        let x = 256 + self.rules.len() as u32;
        self.rules.push(pair);
        let mut fresh: Vec<Pair> = Vec::new();
        for &i in positions {
            let j = self.next[i as usize];
            let (p, q) = (self.prev[i as usize], self.next[j as usize]);
            self.seq[i as usize] = x;
            self.seq[j as usize] = DEAD;
            self.next[i as usize] = q;
            if q != NONE {
                self.prev[q as usize] = i;
            }
            if p != NONE {
                let left = (self.seq[p as usize], x);
                self.table.occ.entry(left).or_default().push(p);
                fresh.push(left);
            }
            if q != NONE {
                let right = (x, self.seq[q as usize]);
                self.table.occ.entry(right).or_default().push(i);
                fresh.push(right);
            }
        }
        fresh.sort_unstable();
        fresh.dedup();
        for pair in fresh {
            let len = self.table.occ[&pair].len();
            if len >= 2 {
                self.table.heap.push((len, Reverse(pair)));
            }
        }
    }

    /// The current working sequence as raw symbol values.
    pub fn sequence(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut i = self.head;
        while i != NONE {
            out.push(self.seq[i as usize]);
            i = self.next[i as usize];
        }
        out
    }

    /// Non-overlapping occurrence count of `pair` according to the table.
    pub fn pair_count(&self, pair: Pair) -> usize {
        match self.table.occ.get(&pair) {
            Some(list) => self.non_overlapping(&self.valid_positions(pair, list.clone())).len(),
            None => 0,
        }
    }

    pub fn rules(&self) -> &[Pair] {
        &self.rules
    }

    pub fn finish(self) -> Result<Grammar> {
        let start = self.rules.len() as u32;
        let seq = self.sequence();
        let mut rules: Vec<Vec<Symbol>> = self
            .rules
            .iter()
            .map(|&(a, b)| vec![Symbol::from_raw(a), Symbol::from_raw(b)])
            .collect();
        rules.push(seq.into_iter().map(Symbol::from_raw).collect());
        Grammar::new(rules, start)
    }
}

/// Left-to-right non-overlapping pair counts of a plain sequence.
pub fn recount(seq: &[u32]) -> HashMap<Pair, usize> {
    let mut counts = HashMap::new();
    let mut last: HashMap<Pair, usize> = HashMap::new();
    for i in 0..seq.len().saturating_sub(1) {
        let pair = (seq[i], seq[i + 1]);
        if last.get(&pair).is_some_and(|&p| p + 1 == i) {
            continue;
        }
        last.insert(pair, i);
        *counts.entry(pair).or_insert(0) += 1;
    }
    counts
}
