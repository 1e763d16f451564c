//! Abstract argumentation workbench: exact Dung semantics, a recurrent
//! message-passing model trained to approximate acceptance, and a search
//! procedure that enumerates extensions guided by either.
//!
//! The crate is organised bottom-up:
//!
//! * [`af`]: frameworks, argument sets, APX text format.
//! * [`solver`]: exact semantics (grounded, complete, preferred, stable),
//!   acceptance maps, and a brute-force reference oracle.
//! * [`generate`]: seeded random AF families with isomorphism-aware dedup.
//! * [`dataset`]: JSONL acceptance datasets built from exact labels.
//! * [`numerics`]: dense matrices, reverse-mode tape, AdamW and schedules.
//! * [`model`]: the recurrent message-passing network over AF graphs.
//! * [`train`]: training loop, metrics, evaluation, checkpoints.
//! * [`search`]: extension enumeration driven by acceptance labels.

pub mod af;
pub mod dataset;
pub mod generate;
pub mod model;
pub mod numerics;
pub mod search;
pub mod solver;
pub mod train;

use thiserror::Error;

/// Crate-wide error type. CLI exit codes map from these variants.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments, configuration, or API misuse.
    #[error("usage: {0}")]
    Usage(String),
    /// Malformed input text (APX, JSONL, config). Lines are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A configured resource bound was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// Training or inference produced a non-finite value.
    #[error("numerical failure: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, message: msg.into() }
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

/// Lowercase hex encoding, used for digests and artifact hashes.
pub(crate) fn to_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}
