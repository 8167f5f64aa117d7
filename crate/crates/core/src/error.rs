use std::io;

use thiserror::Error;

/// Everything that can go wrong while loading, building, or querying an index.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// The byte stream does not follow the expected file layout.
    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    /// The grammar is structurally broken (cycle, dangling reference, ...).
    #[error("invalid grammar: {0}")]
    Validation(String),

    /// The text does not end in exactly one `$` terminator.
    #[error("terminator error: {0}")]
    Terminator(String),

    #[error("position out of bounds: [{start}, {end}] with text length {len}")]
    OutOfBounds { start: u64, end: u64, len: u64 },

    #[error("empty pattern")]
    EmptyPattern,

    #[error("graph is not acyclic")]
    Cycle,

    #[error("input too large for brute-force oracle: {len} > {cap}")]
    Scale { len: usize, cap: usize },

    #[error("pattern length {length} exceeds text length {text_len}")]
    Length { length: u64, text_len: u64 },

    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
