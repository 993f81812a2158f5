use thiserror::Error;

/// Errors raised by the measure, integration and norm routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{atoms} atoms exceed the exhaustive cap of {cap}; use sampled mode")]
    ExhaustiveCap { atoms: usize, cap: usize },

    #[error("invalid exponent p = {0}; p must satisfy p >= 1")]
    InvalidExponent(f64),

    #[error("candidate set carries no weights")]
    MissingWeights,

    #[error("empty {0}")]
    Empty(&'static str),

    #[error(
        "no convergence after {depth} refinement levels: last sums {last} and {previous}"
    )]
    NonConvergence {
        depth: usize,
        last: f64,
        previous: f64,
    },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
