use thiserror::Error;

use crate::compatibility::CertificationReport;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),

    #[error("unknown outcome label {0}")]
    UnknownOutcome(usize),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("degenerate scenario: sum of quantum overlaps is zero")]
    DegenerateScenario,

    #[error("ensemble does not satisfy the equal-overlap PP-incompatibility preconditions ({} of {} triples certified, overlaps_equal = {})", .0.triples_pp_incompatible, .0.triples_total, .0.overlaps_equal)]
    NotCertified(Box<CertificationReport>),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("undefined ratio: {0}")]
    Undefined(String),

    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse { path: String, line: usize, column: usize, message: String },

    #[error("document failed validation:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
