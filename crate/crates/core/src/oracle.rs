//! Brute-force reference implementations used to check the real ones.
//!
//! Nothing here is fast and nothing here shares code with the index: maximal
//! repeats come from exhaustive enumeration of repeated substrings, and the
//! reference CDAWG is obtained the textbook way (suffix trie, merge states
//! with equal right languages, drop unary states).

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::cdawg::{Cdawg, Edge, Node, NodeId};
use crate::error::{Error, Result};
use crate::slg::{Grammar, Symbol, SymbolKind};

/// Largest text [`maximal_repeats`] accepts.
pub const REPEATS_CAP: usize = 4096;
/// Largest text [`reference_cdawg`] accepts.
pub const REFERENCE_CDAWG_CAP: usize = 512;

/// All occurrences of `pattern` in `text`, ascending. O(n·m).
pub fn naive_search(text: &[u8], pattern: &[u8]) -> Vec<u64> {
    if pattern.is_empty() || pattern.len() > text.len() {
        return Vec::new();
    }
    text.windows(pattern.len())
        .enumerate()
        .filter(|(_, w)| *w == pattern)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Recursive expansion of one symbol, for checking the streaming decoder.
pub fn expand_recursive(g: &Grammar, s: Symbol) -> Vec<u8> {
    fn go(g: &Grammar, s: Symbol, out: &mut Vec<u8>) {
        match s.kind() {
            SymbolKind::Terminal(b) => out.push(b),
            SymbolKind::Rule(r) => {
                for &c in g.rule(r) {
                    go(g, c, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(g, s, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepeatReport {
    /// Every maximal repeat, the empty string included.
    pub maximal_repeats: BTreeSet<Vec<u8>>,
    /// Total right-extensions `er(T)`.
    pub er: u64,
    /// Total left-extensions `el(T)`.
    pub el: u64,
}

/// Enumerates every substring occurring at least twice and keeps those that
/// are both left- and right-maximal.
///
/// An occurrence touching the start (end) of the text counts as having a
/// left (right) context distinct from every character, so it alone makes the
/// repeat left- (right-) maximal. The empty string is always a maximal repeat
/// whose extensions are the distinct characters of the text.
pub fn maximal_repeats(text: &[u8]) -> Result<RepeatReport> {
    if text.len() > REPEATS_CAP {
        return Err(Error::Scale { len: text.len(), cap: REPEATS_CAP });
    }
    let n = text.len();
    let mut report = RepeatReport { maximal_repeats: BTreeSet::new(), er: 0, el: 0 };
    if n == 0 {
        return Ok(report);
    }
    let distinct = text.iter().collect::<BTreeSet<_>>().len() as u64;
    report.maximal_repeats.insert(Vec::new());
    report.er += distinct;
    report.el += distinct;

    // Each stack entry is the full occurrence list of one repeated substring
    // of length `len`. Children are its one-character right extensions.
    let mut stack: Vec<(usize, Vec<usize>)> = group_by_next(text, 0, (0..n).collect());
    while let Some((len, occ)) = stack.pop() {
        let mut left = BTreeSet::new();
        let mut left_boundary = false;
        let mut right = BTreeSet::new();
        let mut right_boundary = false;
        for &i in &occ {
            if i == 0 {
                left_boundary = true;
            } else {
                left.insert(text[i - 1]);
            }
            if i + len == n {
                right_boundary = true;
            } else {
                right.insert(text[i + len]);
            }
        }
        let left_maximal = left_boundary || left.len() >= 2;
        let right_maximal = right_boundary || right.len() >= 2;
        if left_maximal && right_maximal {
            report.maximal_repeats.insert(text[occ[0]..occ[0] + len].to_vec());
            report.er += right.len() as u64;
            report.el += left.len() as u64;
        }
        stack.extend(group_by_next(text, len, occ));
    }
    Ok(report)
}

/// Splits occurrences of a length-`len` substring by their next character,
/// keeping only extensions that still repeat.
fn group_by_next(text: &[u8], len: usize, occ: Vec<usize>) -> Vec<(usize, Vec<usize>)> {
    let mut groups: HashMap<u8, Vec<usize>> = HashMap::new();
    for i in occ {
        if i + len < text.len() {
            groups.entry(text[i + len]).or_default().push(i);
        }
    }
    let mut out: Vec<(usize, Vec<usize>)> = groups
        .into_values()
        .filter(|g| g.len() >= 2)
        .map(|g| (len + 1, g))
        .collect();
    out.sort_by_key(|(_, g)| g[0]);
    out
}

/// The CDAWG of `text` built from its suffix trie: states with identical
/// right languages are merged (giving the minimal DAWG), then states with a
/// single out-transition are contracted into their edges.
///
/// Node ids: source 0, sink 1, the rest in breadth-first order.
pub fn reference_cdawg(text: &[u8]) -> Result<Cdawg> {
    if text.len() > REFERENCE_CDAWG_CAP {
        return Err(Error::Scale { len: text.len(), cap: REFERENCE_CDAWG_CAP });
    }
    if text.is_empty() {
        return Err(Error::Terminator("empty text".into()));
    }
    let n = text.len();

    // Suffix trie with sorted child lists.
    let mut children: Vec<Vec<(u8, usize)>> = vec![Vec::new()];
    let mut depth: Vec<usize> = vec![0];
    for i in 0..n {
        let mut v = 0;
        for &c in &text[i..] {
            v = match children[v].binary_search_by_key(&c, |&(x, _)| x) {
                Ok(at) => children[v][at].1,
                Err(at) => {
                    children.push(Vec::new());
                    depth.push(depth[v] + 1);
                    let w = children.len() - 1;
                    children[v].insert(at, (c, w));
                    w
                }
            };
        }
    }

    // Minimization by hash-consing right languages, children first. Trie
    // nodes are created parent-before-child, so reverse id order works.
    let mut class = vec![usize::MAX; children.len()];
    let mut classes: HashMap<Vec<(u8, usize)>, usize> = HashMap::new();
    let mut class_edges: Vec<Vec<(u8, usize)>> = Vec::new();
    let mut class_len: Vec<usize> = Vec::new();
    for v in (0..children.len()).rev() {
        let sig: Vec<(u8, usize)> = children[v].iter().map(|&(c, w)| (c, class[w])).collect();
        let next = classes.len();
        let id = *classes.entry(sig.clone()).or_insert(next);
        if id == next {
            class_edges.push(sig);
            class_len.push(0);
        }
        class_len[id] = class_len[id].max(depth[v]);
        class[v] = id;
    }
    let root = class[0];
    let sink = class_edges.iter().position(|e| e.is_empty()).expect("leaves exist");

    // Compaction: explicit states are the root, the sink, and branching states.
    let explicit = |c: usize| c == root || class_edges[c].len() != 1;
    let mut ids: HashMap<usize, NodeId> = HashMap::from([(root, 0), (sink, 1)]);
    let mut order = vec![root, sink];
    let mut nodes: Vec<Node> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut at = 0;
    while at < order.len() {
        let c = order[at];
        at += 1;
        let mut out = Vec::new();
        for &(first, mut w) in &class_edges[c] {
            let mut label = vec![first];
            while !explicit(w) {
                let (ch, next) = class_edges[w][0];
                label.push(ch);
                w = next;
            }
            let target = *ids.entry(w).or_insert_with(|| {
                order.push(w);
                (order.len() - 1) as NodeId
            });
            let start = naive_search(text, &label)[0];
            edges.push(Edge { target, start, end: start + label.len() as u64 - 1, first_char: first });
            out.push((edges.len() - 1) as u32);
        }
        nodes.push(Node { len: class_len[c] as u64, count: 0, edges: out });
    }
    let mut cdawg = Cdawg::from_parts(nodes, edges, 0, 1, n as u64)?;
    cdawg.compute_counts()?;
    Ok(cdawg)
}

fn label<'t>(c: &Cdawg, e: u32, text: &'t [u8]) -> &'t [u8] {
    let edge = c.edge(e);
    &text[edge.start as usize..=edge.end as usize]
}

/// Checks that two CDAWGs are isomorphic, comparing spelled edge labels
/// rather than raw intervals. Node lengths and path counts must agree too.
pub fn isomorphic(a: &Cdawg, text_a: &[u8], b: &Cdawg, text_b: &[u8]) -> std::result::Result<(), String> {
    if a.stats() != b.stats() {
        return Err(format!("shape differs: {:?} vs {:?}", a.stats(), b.stats()));
    }
    let mut map: Vec<Option<NodeId>> = vec![None; a.nodes().len()];
    let mut used = vec![false; b.nodes().len()];
    map[a.source() as usize] = Some(b.source());
    used[b.source() as usize] = true;
    let mut queue = vec![(a.source(), b.source())];
    while let Some((u, v)) = queue.pop() {
        let (nu, nv) = (a.node(u), b.node(v));
        if nu.len != nv.len || nu.count != nv.count {
            return Err(format!("node {u} ~ {v}: (len, count) ({}, {}) vs ({}, {})", nu.len, nu.count, nv.len, nv.count));
        }
        if nu.edges.len() != nv.edges.len() {
            return Err(format!("node {u} ~ {v}: out-degree {} vs {}", nu.edges.len(), nv.edges.len()));
        }
        for (&ea, &eb) in nu.edges.iter().zip(&nv.edges) {
            let (la, lb) = (label(a, ea, text_a), label(b, eb, text_b));
            if la != lb {
                return Err(format!(
                    "node {u} ~ {v}: label {:?} vs {:?}",
                    String::from_utf8_lossy(la),
                    String::from_utf8_lossy(lb)
                ));
            }
            let (ta, tb) = (a.edge(ea).target, b.edge(eb).target);
            match map[ta as usize] {
                Some(m) if m == tb => {}
                Some(m) => return Err(format!("node {ta} maps to both {m} and {tb}")),
                None => {
                    if std::mem::replace(&mut used[tb as usize], true) {
                        return Err(format!("node {tb} is the image of two nodes"));
                    }
                    map[ta as usize] = Some(tb);
                    queue.push((ta, tb));
                }
            }
        }
    }
    if map.iter().any(Option::is_none) {
        return Err("some nodes are unreachable from the source".into());
    }
    Ok(())
}

/// Every suffix spelled by a source-to-sink path, for small CDAWGs.
pub fn path_strings(c: &Cdawg, text: &[u8]) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(c.source(), Vec::new())];
    while let Some((v, s)) = stack.pop() {
        if v == c.sink() {
            out.insert(s);
            continue;
        }
        for (e, edge) in c.out_edges(v) {
            let mut t = s.clone();
            t.extend_from_slice(label(c, e, text));
            stack.push((edge.target, t));
        }
    }
    out
}
