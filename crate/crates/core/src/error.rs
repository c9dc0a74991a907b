use thiserror::Error;

/// Errors shared by the descent machinery.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero input")]
    ZeroInput,

    #[error("input exceeds the desk-scale factorization bound (|m| < 2^96)")]
    TooLarge,

    #[error("expected an odd integer")]
    EvenInput,

    #[error("modulus must be positive and odd")]
    BadModulus,

    #[error("inputs are not coprime")]
    NotCoprime,

    #[error("invalid curve triple: {0}")]
    BadCurve(String),

    #[error("invalid twist parameter: {0}")]
    BadTwist(String),

    #[error("invalid descent class: {0}")]
    BadLambda(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("local solvability oracle inconclusive at {place} (depth {depth})")]
    Inconclusive { place: String, depth: u32 },

    #[error("no usable local point at {0} within the precision ladder")]
    NoLocalPoint(String),

    #[error("conic {0}x² + {1}y² + {2}z² = 0 has no rational point")]
    ConicUnsolvable(String, String, String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
