//! Instance generation, file formats, the brute-force verification
//! oracle, the strategy registry, and the benchmark runner for `lp-core`.
//!
//! The crate is the executable surface of the workspace: everything here
//! either feeds problems into the library (parsers in [`mps`], [`dimacs`],
//! [`otfmt`]; generators in [`gen`]) or measures what comes back out (the
//! exhaustive [`oracle`], the [`registry`] of initialization strategies,
//! and the [`bench`] runner with CSV/JSON reporting). The `lpinit` binary
//! wires these into a command line.

pub mod bench;
pub mod dimacs;
pub mod gen;
pub mod mps;
pub mod oracle;
pub mod otfmt;
pub mod registry;

use std::fmt;

use lp_core::model::{GeneralLp, Relation, Sense, StandardLp};

/// View an equality-form program as a general one, so components that take
/// general programs (the registry, the bench runner) can run it.
pub fn standard_to_general(lp: &StandardLp) -> Result<GeneralLp, Error> {
    Ok(GeneralLp::with_default_bounds(
        Sense::Minimize,
        lp.c.clone(),
        lp.a.clone(),
        vec![Relation::Eq; lp.m()],
        lp.b.clone(),
    )?)
}

/// Errors raised by the harness itself, plus a carrier for library errors.
#[derive(Debug)]
pub enum Error {
    /// A text format failed to parse; the line number is 1-based.
    Parse { line: usize, msg: String },
    /// A requested operation exceeded a configured size limit.
    TooLarge(String),
    /// A name (strategy, kind, format) is not recognized.
    UnknownName(String),
    /// Invalid generator or runner configuration.
    BadSpec(String),
    Io(std::io::Error),
    Core(lp_core::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, msg } => write!(f, "line {}: {}", line, msg),
            Error::TooLarge(msg) => write!(f, "too large: {}", msg),
            Error::UnknownName(msg) => write!(f, "unknown name: {}", msg),
            Error::BadSpec(msg) => write!(f, "bad specification: {}", msg),
            Error::Io(e) => write!(f, "i/o error: {}", e),
            Error::Core(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e)
    }
}

impl From<lp_core::Error> for Error {
    fn from(e: lp_core::Error) -> Error {
        Error::Core(e)
    }
}
