//! The `cdawg-slg` command line.
//!
//! Exit codes: 0 on success (or pattern found), 1 when `query exists` finds
//! nothing, 2 on any usage, format or I/O error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::access::{AccessCounters, FifoCache, RandomAccess, DEFAULT_CACHE_CAPACITY};
use crate::cdawg::{build_cdawg, Cdawg, CdawgStats};
use crate::corpus;
use crate::error::{Error, Result};
use crate::matcher::Matcher;
use crate::oracle;
use crate::repair::repair_compress;
use crate::slg::{Grammar, GrammarFormat, GrammarStats, Symbol, TERMINATOR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub const DEFAULT_LENGTHS: [u64; 4] = [10, 100, 1_000, 10_000];
pub const DEFAULT_REPS: usize = 1_000;

#[derive(Parser, Debug)]
#[command(name = "cdawg-slg", version, about = "CDAWG index over grammar-compressed text")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Binary,
    Text,
}

impl From<FormatArg> for GrammarFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Binary => GrammarFormat::Binary,
            FormatArg::Text => GrammarFormat::Text,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QueryMode {
    Exists,
    Count,
    Locate,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compress a raw text into a grammar with Re-Pair.
    Compress {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: FormatArg,
    },
    /// Convert a Re-Pair `.R`/`.C` file pair into a grammar.
    Import {
        rules: PathBuf,
        sequence: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: FormatArg,
    },
    /// Build the CDAWG of a grammar's text.
    Index {
        grammar: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CACHE_CAPACITY)]
        cache_capacity: usize,
        #[arg(long)]
        json: bool,
    },
    /// Search for a pattern (`@path` reads it from a file).
    Query {
        grammar: PathBuf,
        cdawg: PathBuf,
        #[arg(value_enum)]
        mode: QueryMode,
        pattern: OsString,
    },
    /// Report grammar and index sizes.
    Stats {
        grammar: PathBuf,
        #[arg(long)]
        cdawg: Option<PathBuf>,
        /// Also run the brute-force oracle (small inputs only).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// Time locate on patterns drawn at random positions of the text.
    Bench {
        grammar: PathBuf,
        cdawg: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LENGTHS)]
        lengths: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Write one of the synthetic corpora.
    GenCorpus {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(corpus::CORPORA))]
        name: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = corpus::DESK_CORPUS_LEN)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Compress { input, output, format } => {
            let raw = fs::read(&input)?;
            let g = repair_compress(&raw)?;
            save_grammar(&g, &output, format.into())?;
            let s = g.stats();
            writeln!(out, "n {}  rules {}  size {}  depth {}", s.text_len, s.rules, s.size, s.height)?;
        }
        Command::Import { rules, sequence, output, format } => {
            let g = import_repair(&fs::read(&rules)?, &fs::read(&sequence)?)?;
            save_grammar(&g, &output, format.into())?;
            let s = g.stats();
            writeln!(out, "n {}  rules {}  size {}  depth {}", s.text_len, s.rules, s.size, s.height)?;
        }
        Command::Index { grammar, output, cache_capacity, json } => {
            let ra = RandomAccess::new(load_grammar(&grammar)?);
            let mut counters = AccessCounters::default();
            let started = Instant::now();
            let cdawg = build_cdawg(&ra, &mut FifoCache::new(cache_capacity), &mut counters)?;
            let seconds = started.elapsed().as_secs_f64();
            let mut w = BufWriter::new(File::create(&output)?);
            cdawg.write_to(&mut w)?;
            let report = IndexReport { cdawg: cdawg.stats(), counters, cache_hit_rate: counters.hit_rate(), seconds };
            if json {
                writeln!(out, "{}", serde_json::to_string(&report).expect("serializable"))?;
            } else {
                let s = report.cdawg;
                writeln!(out, "nodes {}  edges {}  source out-degree {}", s.nodes, s.edges, s.source_out_degree)?;
                writeln!(
                    out,
                    "construction ra_calls {}  chars decoded {}  cache hit rate {:.4}  time {:.3}s",
                    counters.ra_calls, counters.chars_decoded, report.cache_hit_rate, seconds
                )?;
            }
        }
        Command::Query { grammar, cdawg, mode, pattern } => {
            let pattern = read_pattern(pattern)?;
            let ra = RandomAccess::new(load_grammar(&grammar)?);
            let cdawg = load_cdawg(&cdawg, &ra)?;
            let q = Matcher::new(&cdawg, &ra);
            let mut counters = AccessCounters::default();
            match mode {
                QueryMode::Exists => {
                    if !q.exists(&pattern, &mut counters)? {
                        return Ok(EXIT_NOT_FOUND);
                    }
                }
                QueryMode::Count => writeln!(out, "{}", q.count(&pattern, &mut counters)?)?,
                QueryMode::Locate => {
                    let mut w = BufWriter::new(out);
                    for p in q.locate(&pattern, &mut counters)?.positions {
                        writeln!(w, "{p}")?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Stats { grammar, cdawg, oracle, json } => {
            let ra = RandomAccess::new(load_grammar(&grammar)?);
            let cdawg = cdawg.map(|p| load_cdawg(&p, &ra)).transpose()?;
            let report = stats_report(&ra, cdawg.as_ref(), oracle)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&report).expect("serializable"))?;
            } else {
                write!(out, "{}", report.to_text())?;
            }
        }
        Command::Bench { grammar, cdawg, lengths, reps, seed, json } => {
            let ra = RandomAccess::new(load_grammar(&grammar)?);
            let cdawg = load_cdawg(&cdawg, &ra)?;
            let report = bench(&ra, &cdawg, &lengths, reps, seed)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&report).expect("serializable"))?;
            } else {
                write!(out, "{}", report.to_text())?;
            }
        }
        Command::GenCorpus { name, output, len, seed } => {
            let text = corpus::generate(&name, len, seed).expect("name validated by clap");
            fs::write(&output, text)?;
        }
    }
    Ok(EXIT_OK)
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    Grammar::load_auto(BufReader::new(File::open(path)?))
}

fn save_grammar(g: &Grammar, path: &Path, format: GrammarFormat) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    g.save(&mut w, format)?;
    w.flush()?;
    Ok(())
}

fn load_cdawg(path: &Path, ra: &RandomAccess) -> Result<Cdawg> {
    let c = Cdawg::read_from(BufReader::new(File::open(path)?))?;
    if c.text_len() != ra.len() {
        return Err(Error::Format(format!(
            "CDAWG indexes a text of length {} but the grammar produces {}",
            c.text_len(),
            ra.len()
        )));
    }
    Ok(c)
}

fn read_pattern(arg: OsString) -> Result<Vec<u8>> {
    let bytes = os_bytes(arg)?;
    match bytes.strip_prefix(b"@") {
        Some(path) => Ok(fs::read(os_path(path)?)?),
        None => Ok(bytes),
    }
}

#[cfg(unix)]
fn os_bytes(s: OsString) -> Result<Vec<u8>> {
    use std::os::unix::ffi::OsStringExt;
    Ok(s.into_vec())
}

#[cfg(not(unix))]
fn os_bytes(s: OsString) -> Result<Vec<u8>> {
    s.into_string()
        .map(String::into_bytes)
        .map_err(|_| Error::Usage("pattern is not valid Unicode".into()))
}

fn os_path(bytes: &[u8]) -> Result<PathBuf> {
    std::str::from_utf8(bytes)
        .map(PathBuf::from)
        .map_err(|_| Error::Usage("pattern file path is not valid UTF-8".into()))
}

/// Converts Re-Pair output: `.R` holds a little-endian `i32` alphabet size
/// `a`, `a` bytes mapping symbol ids to characters, then `(i32 left, i32
/// right)` pairs; `.C` holds the final sequence as `i32`s. Ids below `a`
/// are characters; id `a + k` is pair `k`. A `$` is appended to the start
/// rule unless the text already contains one.
pub fn import_repair(r: &[u8], c: &[u8]) -> Result<Grammar> {
    let int = |b: &[u8], at: usize| -> Result<u32> {
        let v = i32::from_le_bytes(b[at..at + 4].try_into().unwrap());
        u32::try_from(v).map_err(|_| Error::Format(format!("negative symbol {v}")))
    };
    if r.len() < 4 {
        return Err(Error::Format("rules file too short".into()));
    }
    let alph = int(r, 0)? as usize;
    if alph > 256 || r.len() < 4 + alph || !(r.len() - 4 - alph).is_multiple_of(8) {
        return Err(Error::Format("rules file size does not match its alphabet and pair count".into()));
    }
    if c.is_empty() || !c.len().is_multiple_of(4) {
        return Err(Error::Format("sequence file must be a non-empty list of 32-bit integers".into()));
    }
    let map = &r[4..4 + alph];
    let pairs = (r.len() - 4 - alph) / 8;
    let symbol = |id: u32| -> Result<Symbol> {
        let id = id as usize;
        if id < alph {
            Ok(Symbol::terminal(map[id]))
        } else if id - alph < pairs {
            Ok(Symbol::rule((id - alph) as u32))
        } else {
            Err(Error::Format(format!("symbol {id} refers to a missing pair")))
        }
    };
    let mut rules = Vec::with_capacity(pairs + 1);
    for k in 0..pairs {
        let at = 4 + alph + 8 * k;
        rules.push(vec![symbol(int(r, at)?)?, symbol(int(r, at + 4)?)?]);
    }
    let mut start = (0..c.len() / 4).map(|i| symbol(int(c, 4 * i)?)).collect::<Result<Vec<_>>>()?;
    if !map.contains(&TERMINATOR) {
        start.push(Symbol::terminal(TERMINATOR));
    }
    rules.push(start);
    Grammar::new(rules, pairs as u32)
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub cdawg: CdawgStats,
    pub counters: AccessCounters,
    pub cache_hit_rate: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub maximal_repeats: usize,
    pub er: u64,
    pub el: u64,
    /// `MATCH` when the CDAWG has one node per maximal repeat plus the sink
    /// and one edge per right-extension.
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub grammar: GrammarStats,
    pub cdawg: Option<CdawgStats>,
    /// `size < er(T)`, known once a CDAWG is available.
    pub grammar_smaller_than_cdawg: Option<bool>,
    pub oracle: Option<OracleReport>,
}

pub fn stats_report(ra: &RandomAccess, cdawg: Option<&Cdawg>, with_oracle: bool) -> Result<StatsReport> {
    let grammar = ra.grammar().stats();
    let built;
    let cdawg = match (cdawg, with_oracle) {
        (Some(c), _) => Some(c),
        (None, true) => {
            built = build_cdawg(ra, &mut FifoCache::default(), &mut AccessCounters::default())?;
            Some(&built)
        }
        (None, false) => None,
    };
    let oracle = if with_oracle {
        let len = usize::try_from(ra.len()).unwrap_or(usize::MAX);
        if len > oracle::REPEATS_CAP {
            return Err(Error::Scale { len, cap: oracle::REPEATS_CAP });
        }
        let text: Vec<u8> = ra.grammar().expand().collect();
        let r = oracle::maximal_repeats(&text)?;
        let s = cdawg.expect("built above").stats();
        let ok = s.edges as u64 == r.er && s.nodes == r.maximal_repeats.len() + 1;
        Some(OracleReport {
            maximal_repeats: r.maximal_repeats.len(),
            er: r.er,
            el: r.el,
            verdict: if ok { "MATCH" } else { "MISMATCH" }.into(),
        })
    } else {
        None
    };
    let cdawg = cdawg.map(Cdawg::stats);
    Ok(StatsReport {
        grammar,
        grammar_smaller_than_cdawg: cdawg.map(|c| grammar.size < c.edges as u64),
        cdawg,
        oracle,
    })
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        let g = &self.grammar;
        let mut rows: Vec<(&str, String)> = vec![
            ("n", g.text_len.to_string()),
            ("rules", g.rules.to_string()),
            ("depth (H)", g.height.to_string()),
            ("size (N)", g.size.to_string()),
            ("|R[S]|", g.start_len.to_string()),
        ];
        if let Some(c) = &self.cdawg {
            rows.push(("cdawg nodes", c.nodes.to_string()));
            rows.push(("cdawg edges (er)", c.edges.to_string()));
            rows.push(("source out-degree", c.source_out_degree.to_string()));
            let cmp = if g.size < c.edges as u64 { "<" } else { ">=" };
            let verdict = if g.size < c.edges as u64 { "grammar smaller" } else { "grammar not smaller" };
            rows.push(("N vs er(T)", format!("{} {cmp} {} ({verdict})", g.size, c.edges)));
        }
        if let Some(o) = &self.oracle {
            rows.push(("oracle repeats", o.maximal_repeats.to_string()));
            rows.push(("oracle er", o.er.to_string()));
            rows.push(("oracle el", o.el.to_string()));
            rows.push(("oracle verdict", o.verdict.clone()));
        }
        rows.iter().map(|(k, v)| format!("{k:<18}{v}\n")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchCorpus {
    pub n: u64,
    pub rules: usize,
    pub height: u32,
    pub size: u64,
    pub er: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub length: u64,
    pub mean_ra_calls: f64,
    pub mean_chars_decoded: f64,
    pub mean_occ: f64,
    /// Matching plus traversal, excluding pattern extraction and sorting.
    pub mean_query_us: f64,
    pub mean_sort_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub generator: &'static str,
    pub seed: u64,
    pub reps: usize,
    pub corpus: BenchCorpus,
    pub results: Vec<BenchRow>,
}

/// Runs the locate benchmark. Start positions come from ChaCha8 seeded with
/// `seed`; each pattern is extracted through random access (untimed), then
/// located with fresh counters under a monotonic clock.
pub fn bench(ra: &RandomAccess, cdawg: &Cdawg, lengths: &[u64], reps: usize, seed: u64) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::Usage("--reps must be at least 1".into()));
    }
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::Usage("--lengths must be a non-empty list of positive lengths".into()));
    }
    let n = ra.len();
    if let Some(&length) = lengths.iter().find(|&&l| l > n) {
        return Err(Error::Length { length, text_len: n });
    }
    let g = ra.grammar().stats();
    let corpus = BenchCorpus { n, rules: g.rules, height: g.height, size: g.size, er: cdawg.stats().edges as u64 };
    let q = Matcher::new(cdawg, ra);
    let mut rng = corpus::rng(seed);
    let mut results = Vec::with_capacity(lengths.len());
    for &length in lengths {
        let (mut ra_calls, mut chars, mut occ) = (0u64, 0u64, 0u64);
        let (mut query_s, mut sort_s) = (0f64, 0f64);
        for _ in 0..reps {
            let i = rng.gen_range(0..=n - length);
            let pattern = ra.access_range(i, i + length - 1, &mut AccessCounters::default())?;
            let mut counters = AccessCounters::default();
            let started = Instant::now();
            let point = q.find_point(&pattern, &mut counters)?;
            let mut positions = point.map(|p| q.positions_at(p)).unwrap_or_default();
            query_s += started.elapsed().as_secs_f64();
            let sorting = Instant::now();
            positions.sort_unstable();
            sort_s += sorting.elapsed().as_secs_f64();
            if positions.binary_search(&i).is_err() {
                return Err(Error::Validation(format!("pattern drawn at {i} was not located there")));
            }
            ra_calls += counters.ra_calls;
            chars += counters.chars_decoded;
            occ += positions.len() as u64;
        }
        let r = reps as f64;
        results.push(BenchRow {
            length,
            mean_ra_calls: ra_calls as f64 / r,
            mean_chars_decoded: chars as f64 / r,
            mean_occ: occ as f64 / r,
            mean_query_us: query_s * 1e6 / r,
            mean_sort_us: sort_s * 1e6 / r,
        });
    }
    Ok(BenchReport { generator: "ChaCha8 (seed_from_u64)", seed, reps, corpus, results })
}

impl BenchReport {
    /// The report with wall-clock fields zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> BenchReport {
        let mut r = self.clone();
        for row in &mut r.results {
            row.mean_query_us = 0.0;
            row.mean_sort_us = 0.0;
        }
        r
    }

    pub fn to_text(&self) -> String {
        let c = &self.corpus;
        let mut s = format!(
            "n {}  rules {}  depth {}  size {}  er {}\nseed {}  reps {}  generator {}\n",
            c.n, c.rules, c.height, c.size, c.er, self.seed, self.reps, self.generator
        );
        s += &format!(
            "{:>8} {:>12} {:>12} {:>14} {:>14} {:>12}\n",
            "length", "query us", "sort us", "ra_calls", "chars", "occ"
        );
        for r in &self.results {
            s += &format!(
                "{:>8} {:>12.3} {:>12.3} {:>14.3} {:>14.3} {:>12.3}\n",
                r.length, r.mean_query_us, r.mean_sort_us, r.mean_ra_calls, r.mean_chars_decoded, r.mean_occ
            );
        }
        s
    }
}
