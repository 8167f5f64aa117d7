mod common;

use cdawg_slg::access::{AccessCounters, FifoCache, RandomAccess};
use cdawg_slg::oracle::expand_recursive;
use cdawg_slg::slg::{Grammar, GrammarFormat, Symbol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn formats_round_trip(seed in any::<u64>(), rules in 1usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_grammar(&mut rng, rules, b"xyz01");
        for format in [GrammarFormat::Binary, GrammarFormat::Text] {
            let bytes = g.to_bytes(format);
            let back = Grammar::load(&bytes[..], format).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(Grammar::load_auto(&bytes[..]).unwrap(), g.clone());
        }
    }

    #[test]
    fn streaming_expansion_matches_recursion(seed in any::<u64>(), rules in 1usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_grammar(&mut rng, rules, b"ab");
        let text: Vec<u8> = g.expand().collect();
        prop_assert_eq!(&text, &expand_recursive(&g, Symbol::rule(g.start())));
        prop_assert_eq!(text.len() as u64, g.text_len());
        prop_assert_eq!(text.iter().filter(|&&c| c == b'$').count(), 1);
        prop_assert_eq!(*text.last().unwrap(), b'$');
        for r in 0..g.rule_count() as u32 {
            let s = Symbol::rule(r);
            prop_assert_eq!(g.expansion_length(s), expand_recursive(&g, s).len() as u64);
        }
    }

    #[test]
    fn ranges_equal_slices(seed in any::<u64>(), rules in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_grammar(&mut rng, rules, b"acgt");
        let text: Vec<u8> = g.expand().collect();
        let ra = RandomAccess::new(g);
        let mut cache = FifoCache::new(8);
        let mut counters = AccessCounters::default();
        for _ in 0..50 {
            let i = rng.gen_range(0..text.len());
            let j = rng.gen_range(i..text.len());
            let before = counters;
            prop_assert_eq!(ra.access_range(i as u64, j as u64, &mut counters).unwrap(), &text[i..=j]);
            prop_assert_eq!(counters.ra_calls, before.ra_calls + 1);
            prop_assert_eq!(counters.chars_decoded, before.chars_decoded + (j - i + 1) as u64);
            prop_assert_eq!(ra.access_char(i as u64, &mut cache, &mut counters).unwrap(), text[i]);
        }
    }
}

#[test]
fn thousand_rule_grammar_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let g = common::random_grammar(&mut rng, 1000, b"abcdefgh");
    assert_eq!(g.rule_count(), 1000);
    for format in [GrammarFormat::Binary, GrammarFormat::Text] {
        let mut buf = Vec::new();
        g.save(&mut buf, format).unwrap();
        assert_eq!(Grammar::load(&buf[..], format).unwrap(), g);
    }
}

#[test]
fn grammar_stream_feeds_the_builder_without_lookahead() {
    // The builder only ever asks for characters it has already consumed, so
    // construction over the grammar decodes each position at most once per
    // cache miss and never past the current one.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = common::random_grammar(&mut rng, 300, b"ab");
    let ra = RandomAccess::new(g);
    let mut counters = AccessCounters::default();
    cdawg_slg::cdawg::build_cdawg(&ra, &mut FifoCache::default(), &mut counters).unwrap();
    assert_eq!(counters.ra_calls, counters.cache_misses);
    assert_eq!(counters.chars_decoded, counters.cache_misses);
}
