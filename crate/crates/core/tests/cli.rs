use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cdawg_slg::slg::{example_grammar, Grammar, GrammarFormat};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdawg-slg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

/// Writes the running-example grammar and its index into `dir`.
fn fixture(dir: &Path) -> (String, String) {
    let slg = path(dir, "fig.slg");
    let cdg = path(dir, "fig.cdg");
    fs::write(&slg, example_grammar().to_bytes(GrammarFormat::Binary)).unwrap();
    let o = run(&["index", &slg, "-o", &cdg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (slg, cdg)
}

#[test]
fn compress_then_stats_round_trips_length() {
    let dir = TempDir::new().unwrap();
    let input = path(dir.path(), "in.txt");
    fs::write(&input, b"to be or not to be, that is the question").unwrap();
    let slg = path(dir.path(), "in.slg");
    assert!(run(&["compress", &input, "-o", &slg]).status.success());
    assert_eq!(&fs::read(&slg).unwrap()[..4], b"SLG1");
    let o = run(&["stats", &slg, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grammar"]["text_len"], 41);

    let text_slg = path(dir.path(), "in.txt.slg");
    assert!(run(&["compress", &input, "-o", &text_slg, "--format", "text"]).status.success());
    let a = Grammar::load_auto(&fs::read(&slg).unwrap()[..]).unwrap();
    let b = Grammar::load_auto(&fs::read(&text_slg).unwrap()[..]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn compress_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let empty = path(dir.path(), "empty");
    fs::write(&empty, b"").unwrap();
    let o = run(&["compress", &empty, "-o", &path(dir.path(), "x")]);
    assert_eq!(o.status.code(), Some(2));
    let dollar = path(dir.path(), "dollar");
    fs::write(&dollar, b"price: $5").unwrap();
    let o = run(&["compress", &dollar, "-o", &path(dir.path(), "x")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("terminator"));
}

#[test]
fn index_reports_and_cache_is_transparent() {
    let dir = TempDir::new().unwrap();
    let (slg, cdg) = fixture(dir.path());
    let uncached = path(dir.path(), "nocache.cdg");
    let a = run(&["index", &slg, "-o", &cdg, "--json"]);
    let b = run(&["index", &slg, "-o", &uncached, "--cache-capacity", "0", "--json"]);
    assert_eq!(fs::read(&cdg).unwrap(), fs::read(&uncached).unwrap());
    let a: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(a["cdawg"]["edges"], 18);
    assert!(b["counters"]["ra_calls"].as_u64() > a["counters"]["ra_calls"].as_u64());
}

#[test]
fn index_rejects_corrupt_grammar() {
    let dir = TempDir::new().unwrap();
    let bad = path(dir.path(), "bad.slg");
    let mut bytes = example_grammar().to_bytes(GrammarFormat::Binary);
    bytes[3] = b'9';
    fs::write(&bad, bytes).unwrap();
    let o = run(&["index", &bad, "-o", &path(dir.path(), "x.cdg")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn query_modes() {
    let dir = TempDir::new().unwrap();
    let (slg, cdg) = fixture(dir.path());
    let o = run(&["query", &slg, &cdg, "count", "GC"]);
    assert_eq!(stdout(&o), "4\n");
    let o = run(&["query", &slg, &cdg, "locate", "AGAGCG"]);
    assert_eq!(stdout(&o), "0\n6\n");
    let o = run(&["query", &slg, &cdg, "exists", "CA"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let o = run(&["query", &slg, &cdg, "exists", "GAGA"]);
    assert_eq!(o.status.code(), Some(0));
    let whole = path(dir.path(), "whole.pat");
    fs::write(&whole, b"AGAGCGAGAGCGCGC$").unwrap();
    let o = run(&["query", &slg, &cdg, "locate", &format!("@{whole}")]);
    assert_eq!(stdout(&o), "0\n");
    let o = run(&["query", &slg, &cdg, "count", ""]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stats_with_oracle() {
    let dir = TempDir::new().unwrap();
    let (slg, cdg) = fixture(dir.path());
    let o = run(&["stats", &slg, "--cdawg", &cdg, "--oracle"]);
    let s = stdout(&o);
    assert!(s.contains("rules             4"), "{s}");
    assert!(s.contains("size (N)          13"), "{s}");
    assert!(s.contains("n                 16"), "{s}");
    assert!(s.contains("oracle verdict    MATCH"), "{s}");

    let tiny = path(dir.path(), "a.txt");
    fs::write(&tiny, b"a").unwrap();
    let tiny_slg = path(dir.path(), "a.slg");
    assert!(run(&["compress", &tiny, "-o", &tiny_slg]).status.success());
    let o = run(&["stats", &tiny_slg, "--oracle", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cdawg"]["edges"], 2);
    assert_eq!(v["oracle"]["er"], 2);
    assert_eq!(v["oracle"]["verdict"], "MATCH");

    let big = path(dir.path(), "big.txt");
    fs::write(&big, vec![b'a'; 5000]).unwrap();
    let big_slg = path(dir.path(), "big.slg");
    assert!(run(&["compress", &big, "-o", &big_slg]).status.success());
    assert_eq!(run(&["stats", &big_slg, "--oracle"]).status.code(), Some(2));
}

#[test]
fn bench_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (slg, cdg) = fixture(dir.path());
    let args = ["bench", &slg, &cdg, "--lengths", "2,4", "--reps", "100", "--seed", "9", "--json"];
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        for row in v["results"].as_array_mut().unwrap() {
            row["mean_query_us"] = 0.into();
            row["mean_sort_us"] = 0.into();
        }
        v
    };
    let a = strip(run(&args));
    let b = strip(run(&args));
    assert_eq!(a, b);
    assert_eq!(a["reps"], 100);
    let o = run(&["bench", &slg, &cdg, "--reps", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bench", &slg, &cdg, "--lengths", "17"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bench", &slg, &cdg, "--lengths", "16", "--reps", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["mean_occ"], 1.0);
}

#[test]
fn import_and_gen_corpus() {
    let dir = TempDir::new().unwrap();
    let mut r = 2i32.to_le_bytes().to_vec();
    r.extend_from_slice(b"ab");
    r.extend_from_slice(&0i32.to_le_bytes());
    r.extend_from_slice(&1i32.to_le_bytes());
    let c: Vec<u8> = [2i32, 2, 0].iter().flat_map(|v| v.to_le_bytes()).collect();
    let (rp, cp, out) = (path(dir.path(), "x.R"), path(dir.path(), "x.C"), path(dir.path(), "x.slg"));
    fs::write(&rp, r).unwrap();
    fs::write(&cp, c).unwrap();
    assert!(run(&["import", &rp, &cp, "-o", &out]).status.success());
    let g = Grammar::load_auto(&fs::read(&out).unwrap()[..]).unwrap();
    assert_eq!(g.expand().collect::<Vec<_>>(), b"ababa$");

    let corpus = PathBuf::from(path(dir.path(), "dna.txt"));
    let o = run(&["gen-corpus", "dna", "-o", corpus.to_str().unwrap(), "--len", "5000"]);
    assert!(o.status.success());
    assert_eq!(fs::read(&corpus).unwrap().len(), 5000);
    assert_eq!(run(&["gen-corpus", "klingon", "-o", "x"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
