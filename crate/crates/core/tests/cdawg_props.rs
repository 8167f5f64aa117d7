mod common;

use std::collections::BTreeSet;

use cdawg_slg::access::{AccessCounters, FifoCache, RandomAccess};
use cdawg_slg::cdawg::{build_cdawg, Cdawg, CdawgBuilder};
use cdawg_slg::oracle::{isomorphic, maximal_repeats, path_strings, reference_cdawg};
use cdawg_slg::slg::{example_grammar, Grammar, Symbol};
use common::{random_text, Guarded, ALPHABETS};
use proptest::prelude::*;

fn text_strategy(max: usize) -> impl Strategy<Value = Vec<u8>> {
    (0..ALPHABETS.len(), 0..=max, any::<u64>()).prop_map(|(a, len, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        random_text(&mut rng, ALPHABETS[a], len)
    })
}

fn build_plain(text: &[u8]) -> Cdawg {
    let mut b = CdawgBuilder::new(text);
    for &c in text {
        b.push(c).unwrap();
    }
    b.finish().unwrap()
}

fn suffixes(text: &[u8]) -> BTreeSet<Vec<u8>> {
    (0..text.len()).map(|i| text[i..].to_vec()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_reference_construction(text in text_strategy(200)) {
        let built = build_plain(&text);
        let reference = reference_cdawg(&text).unwrap();
        prop_assert_eq!(built.verify(&text), Ok(()));
        prop_assert_eq!(isomorphic(&built, &text, &reference, &text), Ok(()));
        let repeats = maximal_repeats(&text).unwrap();
        prop_assert_eq!(built.stats().nodes, repeats.maximal_repeats.len() + 1);
        prop_assert_eq!(built.stats().edges as u64, repeats.er);
    }

    #[test]
    fn recognizes_exactly_the_suffixes(text in text_strategy(120)) {
        let c = build_plain(&text);
        prop_assert_eq!(path_strings(&c, &text), suffixes(&text));
    }

    #[test]
    fn prefixes_are_indexed_online(text in text_strategy(64)) {
        let body = &text[..text.len() - 1];
        let source = Guarded::new(&text);
        let mut b = CdawgBuilder::new(source.clone());
        for (i, &c) in body.iter().enumerate() {
            source.limit.set(i as u64);
            b.push(c).unwrap();
            // Stop early: end this prefix with the terminator.
            let mut early = b.clone();
            source.limit.set(i as u64 + 1);
            early.push(b'$').unwrap();
            let prefix = [&body[..=i], b"$"].concat();
            let c = early.finish().unwrap();
            prop_assert_eq!(c.verify(&prefix), Ok(()));
            prop_assert_eq!(path_strings(&c, &prefix), suffixes(&prefix));
        }
    }

    #[test]
    fn reads_only_consumed_text(text in text_strategy(300)) {
        let source = Guarded::new(&text);
        let mut b = CdawgBuilder::new(source.clone());
        for (i, &c) in text.iter().enumerate() {
            source.limit.set(i as u64);
            b.push(c).unwrap();
        }
        b.finish().unwrap();
    }

    #[test]
    fn memos_agree_with_random_access(seed in any::<u64>(), rules in 1usize..60) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_grammar(&mut rng, rules, b"acgt");
        let text: Vec<u8> = g.expand().collect();
        let ra = RandomAccess::new(g);
        let mut counters = AccessCounters::default();
        let c = build_cdawg(&ra, &mut FifoCache::new(16), &mut counters).unwrap();
        prop_assert_eq!(c.verify(&text), Ok(()));
        let mut probe = AccessCounters::default();
        for e in c.edges() {
            prop_assert_eq!(ra.access_range(e.start, e.start, &mut probe).unwrap(), vec![e.first_char]);
        }
    }
}

#[test]
fn rejects_non_substrings() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let text = random_text(&mut rng, b"acgt", 400);
    let c = build_plain(&text);
    let mut rejected = 0;
    while rejected < 100 {
        let p: Vec<u8> = (0..rng.gen_range(6..12)).map(|_| b"acgt"[rng.gen_range(0..4)]).collect();
        if cdawg_slg::oracle::naive_search(&text, &p).is_empty() {
            let mut v = c.source();
            let mut k = 0;
            let mut ok = true;
            while k < p.len() {
                let Some(e) = c.find_edge(v, p[k]) else { ok = false; break };
                let edge = c.edge(e);
                let label = &text[edge.start as usize..=edge.end as usize];
                let take = label.len().min(p.len() - k);
                if label[..take] != p[k..k + take] {
                    ok = false;
                    break;
                }
                k += take;
                v = edge.target;
            }
            assert!(!ok, "non-substring {:?} traversed", String::from_utf8_lossy(&p));
            rejected += 1;
        }
    }
}

#[test]
fn grammar_and_plain_construction_agree() {
    let g = example_grammar();
    let text: Vec<u8> = g.expand().collect();
    let ra = RandomAccess::new(g);
    let mut counters = AccessCounters::default();
    let from_grammar = build_cdawg(&ra, &mut FifoCache::default(), &mut counters).unwrap();
    assert_eq!(from_grammar, build_plain(&text));
}

#[test]
fn cache_is_transparent() {
    let t = Symbol::terminal;
    let g = Grammar::new(
        vec![vec![Symbol::rule(1), Symbol::rule(1), Symbol::rule(2), t(b'$')], vec![t(b'x'), t(b'y'), Symbol::rule(2)], vec![t(b'y'), t(b'x'), t(b'x')]],
        0,
    )
    .unwrap();
    let ra = RandomAccess::new(g);
    let mut with = AccessCounters::default();
    let mut without = AccessCounters::default();
    let a = build_cdawg(&ra, &mut FifoCache::default(), &mut with).unwrap();
    let b = build_cdawg(&ra, &mut FifoCache::new(0), &mut without).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert!(without.ra_calls >= with.ra_calls);
    assert_eq!(without.cache_hits, 0);
}

#[test]
fn serialization_round_trip() {
    let g = example_grammar();
    let ra = RandomAccess::new(g);
    let c = build_cdawg(&ra, &mut FifoCache::default(), &mut AccessCounters::default()).unwrap();
    let bytes = c.to_bytes();
    let back = Cdawg::from_bytes(&bytes).unwrap();
    assert_eq!(back, c);
    let mut buf = Vec::new();
    back.write_to(&mut buf).unwrap();
    assert_eq!(buf, bytes);
    let mut truncated = bytes.clone();
    truncated.pop();
    assert!(Cdawg::from_bytes(&truncated).is_err());
    let mut trailing = bytes;
    trailing.push(0);
    assert!(Cdawg::from_bytes(&trailing).is_err());
}
