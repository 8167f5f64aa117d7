//! Pattern matching on grammar-compressed text through a CDAWG whose edge
//! labels are resolved by random access into the grammar.

pub mod access;
pub mod cdawg;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod matcher;
pub mod oracle;
pub mod repair;
pub mod slg;

pub use error::{Error, Result};
