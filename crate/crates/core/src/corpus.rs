//! Deterministic synthetic corpora for tests and benchmarks.
//!
//! Every generator draws from ChaCha8 seeded with `seed_from_u64`, so the
//! same (length, seed) always yields the same bytes. None of them emits the
//! terminator byte.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Names accepted by [`generate`].
pub const CORPORA: [&str; 5] = ["dna", "english", "source", "protein", "versions"];

/// Size of each bundled desk corpus.
pub const DESK_CORPUS_LEN: usize = 64 * 1024;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One of the named corpora, exactly `len` bytes long.
pub fn generate(name: &str, len: usize, seed: u64) -> Option<Vec<u8>> {
    Some(match name {
        "dna" => dna(len, seed),
        "english" => english(len, seed),
        "source" => source_code(len, seed),
        "protein" => protein(len, seed),
        "versions" => versions(len, seed),
        _ => return None,
    })
}

/// The bundled desk corpora as (name, text) pairs.
pub fn desk_corpora() -> Vec<(&'static str, Vec<u8>)> {
    CORPORA
        .iter()
        .enumerate()
        .map(|(i, &name)| (name, generate(name, DESK_CORPUS_LEN, 0x5eed + i as u64).unwrap()))
        .collect()
}

/// A collection of related genomes: a random founder sequence followed by
/// copies carrying about 1% point mutations and occasional indels.
pub fn dna(len: usize, seed: u64) -> Vec<u8> {
    const ACGT: &[u8] = b"ACGT";
    let mut rng = rng(seed);
    let founder_len = (len / 8).max(64);
    let founder: Vec<u8> = (0..founder_len).map(|_| *ACGT.choose(&mut rng).unwrap()).collect();
    let mut out = Vec::with_capacity(len + founder_len);
    out.extend_from_slice(&founder);
    while out.len() < len {
        for &c in &founder {
            let roll: f64 = rng.gen();
            if roll < 0.008 {
                out.push(*ACGT.choose(&mut rng).unwrap());
            } else if roll < 0.009 {
                // deletion
            } else if roll < 0.010 {
                out.push(c);
                out.push(*ACGT.choose(&mut rng).unwrap());
            } else {
                out.push(c);
            }
        }
    }
    out.truncate(len);
    out
}

/// Overwrites runs of `N` (lengths in `[min_run, 2 * min_run)`) at random
/// non-overlapping places until at least `fraction` of the text is covered.
pub fn with_n_runs(text: &[u8], fraction: f64, min_run: usize, seed: u64) -> Vec<u8> {
    let mut out = text.to_vec();
    let mut rng = rng(seed);
    let target = (text.len() as f64 * fraction).ceil() as usize;
    let mut taken: Vec<(usize, usize)> = Vec::new();
    let mut covered = 0;
    let mut attempts = 0;
    while covered < target && attempts < 10_000 {
        attempts += 1;
        let run = rng.gen_range(min_run..2 * min_run).min(text.len());
        let at = rng.gen_range(0..=text.len() - run);
        // Keep at least one ordinary character between runs.
        if taken.iter().any(|&(s, e)| at <= e && s <= at + run) {
            continue;
        }
        out[at..at + run].fill(b'N');
        taken.push((at, at + run));
        covered += run;
    }
    out
}

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was", "with", "be", "by",
    "on", "not", "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an", "had",
    "they", "you", "were", "their", "one", "all", "we", "can", "her", "has", "there", "been", "if",
    "more", "when", "will", "would", "who", "so", "no", "time", "people", "into", "only", "other",
    "new", "some", "could", "these", "two", "may", "first", "then", "do", "any", "like", "my", "now",
    "over", "such", "our", "man", "me", "even", "most", "made", "after", "also", "did", "many",
    "before", "must", "through", "back", "years", "where", "much", "your", "way", "well", "down",
    "should", "because", "each", "just", "those", "how", "too", "little", "state", "good", "very",
    "make", "world", "still", "own", "see", "work", "long", "get", "here", "between", "both", "life",
    "being", "under", "never", "day", "same", "another", "know", "while", "last", "might", "us",
    "great", "old", "year", "off", "come", "since", "against", "go", "came", "right", "used", "take",
    "three", "water", "house", "small", "found", "thought", "went", "say", "part", "once", "general",
    "high", "upon", "school", "every", "does", "got", "united", "left", "number", "course", "war",
    "until", "always", "away", "something", "fact", "though", "less", "public", "put", "think",
    "almost", "hand", "enough", "far", "took", "head", "yet", "government", "system", "better", "set",
    "told", "nothing", "night", "end", "why", "called", "didn't", "eyes", "find", "going", "look",
    "asked", "later", "knew", "point", "next", "program", "city", "business", "give", "group",
    "toward", "young", "days", "let", "room", "president", "side", "social", "given", "present",
    "several", "order", "national", "possible", "rather", "second", "face", "per", "among", "form",
    "important", "often", "things", "looked", "early", "white", "case", "john", "become", "large",
    "big", "need", "four", "within", "felt", "along", "children", "saw", "best", "church", "ever",
    "least", "power", "development", "light", "thing", "seemed", "family", "interest", "want",
];

/// Zipf-distributed words with punctuation, capitalization and paragraphs.
pub fn english(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = rng(seed);
    let weights: Vec<f64> = (0..WORDS.len()).map(|r| 1.0 / (r as f64 + 1.0)).collect();
    let dist = rand::distributions::WeightedIndex::new(&weights).unwrap();
    let mut out = Vec::with_capacity(len + 32);
    let mut sentence_start = true;
    while out.len() < len {
        let w = WORDS[rng.sample(&dist)].as_bytes();
        if sentence_start {
            out.push(w[0].to_ascii_uppercase());
            out.extend_from_slice(&w[1..]);
            sentence_start = false;
        } else {
            out.extend_from_slice(w);
        }
        let roll: f64 = rng.gen();
        if roll < 0.06 {
            out.extend_from_slice(b".");
            sentence_start = true;
            out.extend_from_slice(if rng.gen_bool(0.15) { b"\n\n" } else { b" " });
        } else if roll < 0.12 {
            out.extend_from_slice(b", ");
        } else {
            out.push(b' ');
        }
    }
    out.truncate(len);
    out
}

/// Program-like text: templated statements over small identifier pools.
pub fn source_code(len: usize, seed: u64) -> Vec<u8> {
    const NAMES: &[&str] = &["count", "index", "buffer", "node", "edge", "value", "offset", "result", "len", "cache"];
    const TYPES: &[&str] = &["u32", "u64", "usize", "bool", "Vec<u8>"];
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(len + 128);
    let mut f = 0;
    while out.len() < len {
        let name = NAMES.choose(&mut rng).unwrap();
        let ty = TYPES.choose(&mut rng).unwrap();
        out.extend_from_slice(format!("fn {name}_{f}(input: &[{ty}]) -> {ty} {{\n").as_bytes());
        for _ in 0..rng.gen_range(2..8) {
            let a = NAMES.choose(&mut rng).unwrap();
            let b = NAMES.choose(&mut rng).unwrap();
            let line = match rng.gen_range(0..4) {
                0 => format!("    let {a} = {b}.len() + {};\n", rng.gen_range(0..16)),
                1 => format!("    if {a} > {b} {{\n        return {a};\n    }}\n"),
                2 => format!("    for i in 0..{a} {{\n        {b} += input[i];\n    }}\n"),
                _ => format!("    // update {a} from {b}\n    {a} = {b};\n"),
            };
            out.extend_from_slice(line.as_bytes());
        }
        out.extend_from_slice(b"}\n\n");
        f += 1;
    }
    out.truncate(len);
    out
}

/// Protein families: random seed sequences and mutated members.
pub fn protein(len: usize, seed: u64) -> Vec<u8> {
    const AMINO: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";
    let mut rng = rng(seed);
    let families: Vec<Vec<u8>> = (0..24)
        .map(|_| {
            let l = rng.gen_range(120..480);
            (0..l).map(|_| *AMINO.choose(&mut rng).unwrap()).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(len + 512);
    while out.len() < len {
        let fam = families.choose(&mut rng).unwrap();
        for &c in fam {
            if rng.gen_bool(0.05) {
                out.push(*AMINO.choose(&mut rng).unwrap());
            } else {
                out.push(c);
            }
        }
        out.push(b'\n');
    }
    out.truncate(len);
    out
}

/// Successive revisions of one document, each a few word edits away from
/// the previous one, concatenated.
pub fn versions(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = rng(seed);
    let base = english(4096, seed ^ 0x7e57);
    let mut doc: Vec<&[u8]> = base.split(|&b| b == b' ').collect();
    let mut out = Vec::with_capacity(len + 8192);
    let mut version = 0;
    while out.len() < len {
        out.extend_from_slice(format!("== revision {version} ==\n").as_bytes());
        out.extend_from_slice(&doc.join(&b' '));
        out.push(b'\n');
        for _ in 0..rng.gen_range(1..4) {
            let at = rng.gen_range(0..doc.len());
            let w = WORDS.choose(&mut rng).unwrap().as_bytes();
            match rng.gen_range(0..3) {
                0 => doc[at] = w,
                1 => doc.insert(at, w),
                _ if doc.len() > 1 => {
                    doc.remove(at);
                }
                _ => {}
            }
        }
        version += 1;
    }
    out.truncate(len);
    out
}

/// Fibonacci word: `f_1 = b`, `f_2 = a`, `f_k = f_{k-1} f_{k-2}`.
pub fn fibonacci(k: u32) -> Vec<u8> {
    assert!(k >= 1, "Fibonacci words start at k = 1");
    let (mut prev, mut cur) = (b"b".to_vec(), b"a".to_vec());
    if k == 1 {
        return prev;
    }
    for _ in 2..k {
        let next = [cur.as_slice(), prev.as_slice()].concat();
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_words() {
        assert_eq!(fibonacci(1), b"b");
        assert_eq!(fibonacci(2), b"a");
        assert_eq!(fibonacci(3), b"ab");
        assert_eq!(fibonacci(5), b"abaab");
        assert_eq!(fibonacci(6), b"abaababa");
        assert_eq!(fibonacci(18).len(), 2584);
        assert_eq!(fibonacci(25).len(), 75_025);
    }

    #[test]
    fn corpora_are_deterministic_and_terminator_free() {
        for (name, text) in desk_corpora() {
            assert_eq!(text.len(), DESK_CORPUS_LEN, "{name}");
            assert!(!text.contains(&b'$'), "{name}");
            assert_eq!(generate(name, 1000, 9), generate(name, 1000, 9));
        }
        assert_ne!(dna(1000, 1), dna(1000, 2));
        assert!(generate("nope", 10, 0).is_none());
    }

    #[test]
    fn n_runs_cover_requested_fraction() {
        let clean = dna(200_000, 3);
        let runs = with_n_runs(&clean, 0.01, 1000, 4);
        let ns = runs.iter().filter(|&&c| c == b'N').count();
        assert!(ns >= 2000, "{ns}");
        assert!(ns < 6000, "{ns}");
        assert_eq!(runs.len(), clean.len());
    }
}
