//! Straight-line grammars.
//!
//! A grammar is stored as an array of productions. Each production is a
//! non-empty array of [`Symbol`]s; a symbol is either a terminal byte or a
//! reference to another rule. The grammar produces exactly one string, which
//! always ends in the unique terminator byte `$`.
//!
//! Two on-disk encodings are supported. The binary `SLG1` layout is all
//! little-endian `u32`:
//!
//! ```text
//! "SLG1" rule_count start_rule { length symbol* }*
//! ```
//!
//! where a symbol value below 256 is a terminal byte and a value `v >= 256`
//! refers to rule `v - 256`. The text layout is meant for debugging:
//!
//! ```text
//! SLG 1
//! <rule_count> <start_id>
//! b65 r1 r2 b36
//! ...
//! ```

use std::fmt;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// The byte every indexed text ends with.
pub const TERMINATOR: u8 = b'$';

/// Magic bytes of the binary grammar format.
pub const SLG_MAGIC: [u8; 4] = *b"SLG1";

/// Index into a grammar's rule table.
pub type RuleId = u32;

/// A grammar symbol packed into one integer: values below 256 are terminal
/// bytes, larger values are rule ids offset by 256.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Terminal(u8),
    Rule(RuleId),
}

impl Symbol {
    pub const fn terminal(byte: u8) -> Symbol {
        Symbol(byte as u32)
    }

    /// # Panics
    ///
    /// Panics if `id + 256` does not fit in a `u32`.
    pub fn rule(id: RuleId) -> Symbol {
        Symbol(id.checked_add(256).expect("rule id overflows symbol encoding"))
    }

    pub const fn from_raw(raw: u32) -> Symbol {
        Symbol(raw)
    }

    pub const fn raw(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn kind(self) -> SymbolKind {
        if self.0 < 256 {
            SymbolKind::Terminal(self.0 as u8)
        } else {
            SymbolKind::Rule(self.0 - 256)
        }
    }

    #[inline]
    pub const fn is_terminal(self) -> bool {
        self.0 < 256
    }

    #[inline]
    pub const fn as_rule(self) -> Option<RuleId> {
        if self.0 < 256 {
            None
        } else {
            Some(self.0 - 256)
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            SymbolKind::Terminal(b) if b.is_ascii_graphic() => write!(f, "'{}'", b as char),
            SymbolKind::Terminal(b) => write!(f, "b{b}"),
            SymbolKind::Rule(r) => write!(f, "r{r}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarFormat {
    Binary,
    Text,
}

/// Summary numbers for a grammar. `size` is the total production length and
/// `height` the height of the derivation tree: terminals sit at depth 0 and a
/// rule is one deeper than its deepest child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GrammarStats {
    pub rules: usize,
    pub size: u64,
    pub height: u32,
    pub start_len: usize,
    pub text_len: u64,
}

/// A validated straight-line grammar with per-rule expansion lengths.
#[derive(Clone, PartialEq, Eq)]
pub struct Grammar {
    offsets: Vec<usize>,
    symbols: Vec<Symbol>,
    start: RuleId,
    lengths: Vec<u64>,
    height: u32,
}

impl fmt::Debug for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grammar")
            .field("rules", &self.rule_count())
            .field("start", &self.start)
            .field("n", &self.text_len())
            .field("N", &self.size())
            .field("H", &self.height)
            .finish()
    }
}

impl Grammar {
    /// Validates a rule table and computes the length memo.
    ///
    /// Rejects empty productions, dangling rule references, cycles, rules not
    /// reachable from `start`, and texts that do not end in exactly one `$`.
    pub fn new(rules: Vec<Vec<Symbol>>, start: RuleId) -> Result<Grammar> {
        let mut offsets = Vec::with_capacity(rules.len() + 1);
        let mut symbols = Vec::with_capacity(rules.iter().map(Vec::len).sum());
        offsets.push(0);
        for rule in rules {
            symbols.extend(rule);
            offsets.push(symbols.len());
        }
        Self::from_parts(offsets, symbols, start)
    }

    pub(crate) fn from_parts(offsets: Vec<usize>, symbols: Vec<Symbol>, start: RuleId) -> Result<Grammar> {
        let rule_count = offsets.len().saturating_sub(1);
        if rule_count == 0 {
            return Err(Error::Validation("grammar has no rules".into()));
        }
        if start as usize >= rule_count {
            return Err(Error::Validation(format!(
                "start rule {start} out of range ({rule_count} rules)"
            )));
        }
        let mut g = Grammar {
            offsets,
            symbols,
            start,
            lengths: vec![0; rule_count],
            height: 0,
        };
        for v in 0..rule_count {
            let prod = g.rule(v as RuleId);
            if prod.is_empty() {
                return Err(Error::Validation(format!("rule {v} has an empty production")));
            }
            if let Some(bad) = prod.iter().filter_map(|s| s.as_rule()).find(|&r| r as usize >= rule_count) {
                return Err(Error::Validation(format!("rule {v} references missing rule {bad}")));
            }
        }

        let order = g.postorder()?;
        if order.len() != rule_count {
            let mut seen = vec![false; rule_count];
            for &v in &order {
                seen[v as usize] = true;
            }
            let unreachable = seen.iter().position(|&s| !s).unwrap_or(0);
            return Err(Error::Validation(format!(
                "rule {unreachable} is unreachable from the start rule"
            )));
        }

        let mut depth = vec![0u32; rule_count];
        let mut dollars = vec![0u64; rule_count];
        let mut last = vec![0u8; rule_count];
        for &v in &order {
            let (mut len, mut d, mut dl) = (0u64, 0u32, 0u64);
            for &s in g.rule(v) {
                let (l, sd, sdl) = match s.kind() {
                    SymbolKind::Terminal(b) => (1, 0, (b == TERMINATOR) as u64),
                    SymbolKind::Rule(r) => (g.lengths[r as usize], depth[r as usize], dollars[r as usize]),
                };
                len = len
                    .checked_add(l)
                    .ok_or_else(|| Error::Validation("expansion length overflows u64".into()))?;
                d = d.max(sd);
                dl = dl.saturating_add(sdl);
            }
            let tail = *g.rule(v).last().unwrap();
            last[v as usize] = match tail.kind() {
                SymbolKind::Terminal(b) => b,
                SymbolKind::Rule(r) => last[r as usize],
            };
            g.lengths[v as usize] = len;
            depth[v as usize] = d + 1;
            dollars[v as usize] = dl;
        }

        let s = start as usize;
        if dollars[s] != 1 || last[s] != TERMINATOR {
            return Err(Error::Validation(format!(
                "text must end with a unique '$' terminator (found {} occurrences, last byte 0x{:02x})",
                dollars[s], last[s]
            )));
        }
        g.height = depth[s];
        Ok(g)
    }

    /// Iterative DFS from the start rule returning reachable rules in
    /// post-order (children before parents). Fails on a back edge.
    fn postorder(&self) -> Result<Vec<RuleId>> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; self.rule_count()];
        let mut order = Vec::with_capacity(self.rule_count());
        let mut stack: Vec<(RuleId, usize)> = vec![(self.start, 0)];
        color[self.start as usize] = GREY;
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let prod = self.rule(v);
            if i == prod.len() {
                color[v as usize] = BLACK;
                order.push(v);
                stack.pop();
                continue;
            }
            top.1 += 1;
            if let Some(c) = prod[i].as_rule() {
                match color[c as usize] {
                    WHITE => {
                        color[c as usize] = GREY;
                        stack.push((c, 0));
                    }
                    GREY => {
                        return Err(Error::Validation(format!("cycle through rule {c}")));
                    }
                    _ => {}
                }
            }
        }
        Ok(order)
    }

    #[inline]
    pub fn rule(&self, id: RuleId) -> &[Symbol] {
        let id = id as usize;
        &self.symbols[self.offsets[id]..self.offsets[id + 1]]
    }

    pub fn rules(&self) -> impl ExactSizeIterator<Item = &[Symbol]> + '_ {
        self.offsets.windows(2).map(move |w| &self.symbols[w[0]..w[1]])
    }

    pub fn rule_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn start(&self) -> RuleId {
        self.start
    }

    pub fn start_rule(&self) -> &[Symbol] {
        self.rule(self.start)
    }

    /// Length `n` of the produced text, terminator included.
    pub fn text_len(&self) -> u64 {
        self.lengths[self.start as usize]
    }

    /// Total production length `N`.
    pub fn size(&self) -> u64 {
        self.symbols.len() as u64
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Length of the string a symbol expands to. O(1).
    #[inline]
    pub fn expansion_length(&self, s: Symbol) -> u64 {
        match s.kind() {
            SymbolKind::Terminal(_) => 1,
            SymbolKind::Rule(r) => self.lengths[r as usize],
        }
    }

    pub fn stats(&self) -> GrammarStats {
        GrammarStats {
            rules: self.rule_count(),
            size: self.size(),
            height: self.height,
            start_len: self.start_rule().len(),
            text_len: self.text_len(),
        }
    }

    /// Streams the whole text left to right.
    pub fn expand(&self) -> Expand<'_> {
        Expand::new(self, 0, 0, self.text_len())
    }

    pub fn load<R: Read>(mut reader: R, format: GrammarFormat) -> Result<Grammar> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        let (rules, start) = match format {
            GrammarFormat::Binary => decode_binary(&bytes)?,
            GrammarFormat::Text => decode_text(&bytes)?,
        };
        Grammar::new(rules, start)
    }

    /// Picks the format from the leading magic bytes.
    pub fn load_auto<R: Read>(mut reader: R) -> Result<Grammar> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        let format = if bytes.starts_with(&SLG_MAGIC) {
            GrammarFormat::Binary
        } else if bytes.starts_with(b"SLG 1") {
            GrammarFormat::Text
        } else {
            return Err(Error::Format("unrecognized grammar magic".into()));
        };
        Grammar::load(bytes.as_slice(), format)
    }

    pub fn save<W: Write>(&self, writer: W, format: GrammarFormat) -> Result<()> {
        let rules: Vec<&[Symbol]> = self.rules().collect();
        write_rules(&rules, self.start, format, writer)
    }

    pub fn to_bytes(&self, format: GrammarFormat) -> Vec<u8> {
        let mut out = Vec::new();
        self.save(&mut out, format).expect("writing to a Vec cannot fail");
        out
    }
}

/// Serializes a raw rule table. Refuses an empty table, which no reader
/// could turn back into a grammar.
pub fn write_rules<W: Write, P: AsRef<[Symbol]>>(
    rules: &[P],
    start: RuleId,
    format: GrammarFormat,
    mut w: W,
) -> Result<()> {
    if rules.is_empty() {
        return Err(Error::Format("refusing to serialize an empty rule table".into()));
    }
    let count = u32::try_from(rules.len()).map_err(|_| Error::Format("too many rules".into()))?;
    match format {
        GrammarFormat::Binary => {
            let mut buf = Vec::with_capacity(12 + rules.iter().map(|r| 4 + 4 * r.as_ref().len()).sum::<usize>());
            buf.extend_from_slice(&SLG_MAGIC);
            buf.extend_from_slice(&count.to_le_bytes());
            buf.extend_from_slice(&start.to_le_bytes());
            for rule in rules {
                let rule = rule.as_ref();
                let len = u32::try_from(rule.len()).map_err(|_| Error::Format("production too long".into()))?;
                buf.extend_from_slice(&len.to_le_bytes());
                for s in rule {
                    buf.extend_from_slice(&s.raw().to_le_bytes());
                }
            }
            w.write_all(&buf)?;
        }
        GrammarFormat::Text => {
            let mut out = String::new();
            out.push_str("SLG 1\n");
            out.push_str(&format!("{count} {start}\n"));
            for rule in rules {
                let line: Vec<String> = rule
                    .as_ref()
                    .iter()
                    .map(|s| match s.kind() {
                        SymbolKind::Terminal(b) => format!("b{b}"),
                        SymbolKind::Rule(r) => format!("r{r}"),
                    })
                    .collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            w.write_all(out.as_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct LeReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> LeReader<'a> {
    fn u32(&mut self) -> Result<u32> {
        let end = self.pos + 4;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format(format!("truncated grammar at byte {}", self.pos)))?;
        self.pos = end;
        Ok(u32::from_le_bytes(chunk.try_into().unwrap()))
    }

    fn remaining_words(&self) -> usize {
        (self.bytes.len() - self.pos) / 4
    }
}

fn decode_binary(bytes: &[u8]) -> Result<(Vec<Vec<Symbol>>, RuleId)> {
    if !bytes.starts_with(&SLG_MAGIC) {
        return Err(Error::Format("bad magic, expected SLG1".into()));
    }
    let mut r = LeReader { bytes, pos: 4 };
    let count = r.u32()? as usize;
    let start = r.u32()?;
    if count == 0 {
        return Err(Error::Format("empty rule table".into()));
    }
    // Each rule needs at least its length word.
    if count > r.remaining_words() {
        return Err(Error::Format(format!("rule count {count} exceeds file size")));
    }
    let mut rules = Vec::with_capacity(count);
    for _ in 0..count {
        let len = r.u32()? as usize;
        if len > r.remaining_words() {
            return Err(Error::Format(format!("production length {len} exceeds file size")));
        }
        let mut prod = Vec::with_capacity(len);
        for _ in 0..len {
            prod.push(Symbol::from_raw(r.u32()?));
        }
        rules.push(prod);
    }
    if r.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok((rules, start))
}

fn decode_text(bytes: &[u8]) -> Result<(Vec<Vec<Symbol>>, RuleId)> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Format("text grammar is not UTF-8".into()))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("SLG 1") {
        return Err(Error::Format("missing 'SLG 1' header".into()));
    }
    let header = lines.next().ok_or_else(|| Error::Format("missing rule count line".into()))?;
    let nums: Vec<&str> = header.split_whitespace().collect();
    let parse = |s: &str| s.parse::<u32>().map_err(|_| Error::Format(format!("bad integer {s:?}")));
    let (count, start) = match nums.as_slice() {
        [c, s] => (parse(c)? as usize, parse(s)?),
        _ => return Err(Error::Format("expected '<rule_count> <start_id>'".into())),
    };
    if count == 0 {
        return Err(Error::Format("empty rule table".into()));
    }
    let mut rules = Vec::new();
    for line in lines {
        if rules.len() == count {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::Format("more rule lines than declared".into()));
        }
        let mut prod = Vec::new();
        for tok in line.split_whitespace() {
            let (kind, num) = tok.split_at(1);
            let v = parse(num)?;
            prod.push(match kind {
                "b" if v < 256 => Symbol::terminal(v as u8),
                "r" if v <= u32::MAX - 256 => Symbol::rule(v),
                _ => return Err(Error::Format(format!("bad symbol token {tok:?}"))),
            });
        }
        rules.push(prod);
    }
    if rules.len() != count {
        return Err(Error::Format(format!("declared {count} rules, found {}", rules.len())));
    }
    Ok((rules, start))
}

/// Pull-based left-to-right expansion of a slice of the text.
///
/// Holds one `(rule, index)` frame per nesting level, so memory is O(H).
/// Every frame on the stack points at the symbol currently being expanded;
/// the top frame always points at a terminal while characters remain.
#[derive(Clone)]
pub struct Expand<'g> {
    grammar: &'g Grammar,
    stack: Vec<(RuleId, usize)>,
    remaining: u64,
}

impl<'g> Expand<'g> {
    /// Starts at `offset` characters into the expansion of the start rule's
    /// `start_idx`-th symbol and yields at most `count` characters.
    pub(crate) fn new(grammar: &'g Grammar, start_idx: usize, offset: u64, count: u64) -> Expand<'g> {
        let mut it = Expand {
            grammar,
            stack: Vec::with_capacity(grammar.height as usize + 1),
            remaining: count,
        };
        if count > 0 {
            it.stack.push((grammar.start, start_idx));
            it.descend(offset);
        }
        it
    }

    fn descend(&mut self, mut offset: u64) {
        let g = self.grammar;
        loop {
            let &(r, i) = self.stack.last().unwrap();
            let child = match g.rule(r)[i].kind() {
                SymbolKind::Terminal(_) => {
                    debug_assert_eq!(offset, 0);
                    return;
                }
                SymbolKind::Rule(c) => c,
            };
            let prod = g.rule(child);
            let mut c = 0;
            loop {
                let len = g.expansion_length(prod[c]);
                if offset < len {
                    break;
                }
                offset -= len;
                c += 1;
            }
            self.stack.push((child, c));
        }
    }

    fn advance(&mut self) {
        while let Some(top) = self.stack.last_mut() {
            top.1 += 1;
            if top.1 < self.grammar.rule(top.0).len() {
                self.descend(0);
                return;
            }
            self.stack.pop();
        }
    }
}

impl Iterator for Expand<'_> {
    type Item = u8;

    #[inline]
    fn next(&mut self) -> Option<u8> {
        if self.remaining == 0 {
            return None;
        }
        let &(r, i) = self.stack.last()?;
        let b = match self.grammar.rule(r)[i].kind() {
            SymbolKind::Terminal(b) => b,
            SymbolKind::Rule(_) => unreachable!("cursor rests on a terminal"),
        };
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(b)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

/// Applies the ingestion policy to raw input: a single trailing `$` is kept,
/// a missing one is appended, and a `$` anywhere else is rejected.
pub fn terminate(raw: &[u8]) -> Result<Vec<u8>> {
    if raw.is_empty() {
        return Err(Error::Terminator("input is empty".into()));
    }
    let body = raw.strip_suffix(&[TERMINATOR]).unwrap_or(raw);
    if let Some(at) = body.iter().position(|&b| b == TERMINATOR) {
        return Err(Error::Terminator(format!(
            "input contains the reserved terminator byte 0x24 at offset {at}; \
             it may only appear once, as the final byte"
        )));
    }
    let mut text = body.to_vec();
    text.push(TERMINATOR);
    Ok(text)
}

/// The grammar drawn in the running example of the CDAWG literature:
/// `S -> A α β α γ γ $`, `α -> β γ`, `β -> G A`, `γ -> G C`.
pub fn example_grammar() -> Grammar {
    let t = Symbol::terminal;
    let (alpha, beta, gamma) = (Symbol::rule(1), Symbol::rule(2), Symbol::rule(3));
    Grammar::new(
        vec![
            vec![t(b'A'), alpha, beta, alpha, gamma, gamma, t(b'$')],
            vec![beta, gamma],
            vec![t(b'G'), t(b'A')],
            vec![t(b'G'), t(b'C')],
        ],
        0,
    )
    .expect("example grammar is valid")
}
