use thiserror::Error;

use crate::quadratic::Signature;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("eigen-solver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("degenerate quadratic form with signature {0}")]
    Degenerate(Signature),

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("multivectors belong to different Clifford spaces")]
    SpaceMismatch,

    #[error("size {size} exceeds the limit {limit} for {what}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported tag `{0}`")]
    UnsupportedTag(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable name for error objects emitted by the CLI and
    /// the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::NoConvergence { .. } => "no_convergence",
            Error::IterationLimit { .. } => "iteration_limit",
            Error::Singular => "singular",
            Error::Degenerate(_) => "degenerate",
            Error::OutsideDomain { .. } => "outside_domain",
            Error::SpaceMismatch => "space_mismatch",
            Error::TooLarge { .. } => "too_large",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UnsupportedTag(_) => "unsupported_tag",
            Error::Parse(_) => "parse",
        }
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
