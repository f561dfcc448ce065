//! Lazy, flow- and context-sensitive points-to analysis for a small pointer
//! language, with strong-liveness-directed sparse propagation, a call-strings
//! interprocedural engine with value-based termination, baseline analyses
//! (liveness-free variant, conventional may analysis, Andersen), and a bounded
//! concrete-execution oracle.

pub mod analyses;
pub mod callstrings;
pub mod dataflow;
pub mod lang;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("analysis error: {0}")]
    Analysis(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
