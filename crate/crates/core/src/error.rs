use thiserror::Error;

use crate::election::AltSet;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("evaluation cap exceeded: {needed} evaluations needed, cap is {cap}")]
    CapExceeded { needed: u128, cap: u64 },

    /// The base rule returned a committee with zero or several non-dummy
    /// members on a reduced profile.
    #[error("induced rule undefined: committee {committee} has {non_dummy} non-dummy members")]
    NotSingleton { committee: AltSet, non_dummy: usize },

    #[error("inconsistent assignment: {0}")]
    InconsistentAssignment(String),

    #[error("axiom {axiom} is not supported on the {side} side")]
    UnsupportedAxiom { axiom: String, side: &'static str },

    #[error("node {0} is not an allowable facility location")]
    NotAllowable(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("re-verification of a synthesized table failed: {0}")]
    VerificationFailed(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
