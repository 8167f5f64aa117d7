#![allow(dead_code)]

use std::cell::Cell;
use std::rc::Rc;

use cdawg_slg::access::{AccessCounters, FifoCache, RandomAccess};
use cdawg_slg::cdawg::{build_cdawg, Cdawg, TextSource};
use cdawg_slg::slg::{Grammar, Symbol};
use cdawg_slg::Result;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ALPHABETS: [&[u8]; 3] = [b"ab", b"acgt", b"abcdefghijklmnopqrstuvwxyz"];

/// Random text over `alphabet` of length `len`, then `$`.
pub fn random_text<R: Rng>(rng: &mut R, alphabet: &[u8], len: usize) -> Vec<u8> {
    let mut t: Vec<u8> = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
    t.push(b'$');
    t
}

/// A valid grammar with `rules` rules (start included) whose pair rules may
/// be shared. Every rule is reachable and the text ends in its only `$`.
pub fn random_grammar<R: Rng>(rng: &mut R, rules: usize, alphabet: &[u8]) -> Grammar {
    assert!(rules >= 1);
    let mut bodies: Vec<Vec<Symbol>> = Vec::new();
    let mut lengths: Vec<u64> = Vec::new();
    // Symbols not yet referenced by any rule.
    let mut pool: Vec<Symbol> = Vec::new();
    let fresh_terminal = |rng: &mut R| Symbol::terminal(*alphabet.choose(rng).unwrap());
    let len_of = |s: Symbol, lengths: &[u64]| s.as_rule().map_or(1, |r| lengths[r as usize]);
    // Pair rules are numbered 0.., the start rule is last.
    for id in 0..rules - 1 {
        let width = rng.gen_range(1..=3);
        let mut body = Vec::with_capacity(width);
        for _ in 0..width {
            let pick = if !pool.is_empty() && rng.gen_bool(0.7) {
                let at = rng.gen_range(0..pool.len());
                pool.swap_remove(at)
            } else if id > 0 && rng.gen_bool(0.3) {
                // shared reference to a short rule
                let r = rng.gen_range(0..id);
                if lengths[r] <= 64 {
                    Symbol::rule(r as u32)
                } else {
                    fresh_terminal(rng)
                }
            } else {
                fresh_terminal(rng)
            };
            body.push(pick);
        }
        let len = body.iter().map(|&s| len_of(s, &lengths)).sum();
        lengths.push(len);
        bodies.push(body);
        pool.push(Symbol::rule(id as u32));
    }
    pool.shuffle(rng);
    if pool.is_empty() {
        pool.push(fresh_terminal(rng));
    }
    pool.push(Symbol::terminal(b'$'));
    bodies.push(pool);
    Grammar::new(bodies, (rules - 1) as u32).expect("generated grammar is valid")
}

/// Builds the CDAWG of `text` through a Re-Pair grammar.
pub fn index_text(text: &[u8]) -> (Cdawg, RandomAccess) {
    let g = cdawg_slg::repair::repair_compress(text).unwrap();
    let ra = RandomAccess::new(g);
    let c = build_cdawg(&ra, &mut FifoCache::default(), &mut AccessCounters::default()).unwrap();
    (c, ra)
}

/// Text source that fails any read at or past `limit`, the number of
/// characters consumed before the one currently being added.
#[derive(Clone)]
pub struct Guarded {
    pub text: Rc<Vec<u8>>,
    pub limit: Rc<Cell<u64>>,
    pub reads: Rc<Cell<u64>>,
}

impl Guarded {
    pub fn new(text: &[u8]) -> Guarded {
        Guarded { text: Rc::new(text.to_vec()), limit: Rc::new(Cell::new(0)), reads: Rc::new(Cell::new(0)) }
    }
}

impl TextSource for Guarded {
    fn char_at(&mut self, pos: u64) -> Result<u8> {
        assert!(pos < self.limit.get(), "read T[{pos}] with only {} characters consumed", self.limit.get());
        self.reads.set(self.reads.get() + 1);
        Ok(self.text[pos as usize])
    }
}
