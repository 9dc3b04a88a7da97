use thiserror::Error;

/// Errors raised by the exact and certified computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial of degree {0} is too large to factor without hints")]
    DegreeTooLarge(usize),
    #[error("factorization hints rejected: {0}")]
    BadHints(String),
    #[error("precision exhausted at {bits} bits: {reason}")]
    PrecisionExhausted { bits: u32, reason: String },
    #[error("power iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("matrix does not preserve the cone: {0}")]
    ConeViolation(String),
    #[error("all coordinates are zero")]
    AllZero,
    #[error("discriminant has an unfactored part {0}; supply a prime hint")]
    FactorizationNeeded(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a morphism: the forms share a root (resultant is zero)")]
    NotAMorphism,
    #[error("degree {0} is too small; canonical heights need degree at least 2")]
    DegreeTooSmall(usize),
    #[error("degenerate fiber: the fiber quadratic vanishes identically")]
    DegenerateFiber,
    #[error("dominant factor {0} has roots of distinct moduli")]
    MixedModulusFactor(String),
    #[error("affine part has no fixed point")]
    NoFixedPoint,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("height budget exceeded")]
    BudgetExceeded,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
