use thiserror::Error;

/// Errors raised by the evaluation kernels and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero argument passed to {0}")]
    ZeroArgument(&'static str),

    #[error("nome out of range: |p| = {0} (must be <= 0.99)")]
    NomeOutOfRange(f64),

    #[error("truncation exhausted after {factors} factors (tail bound not reached)")]
    TruncationExhausted { factors: usize },

    /// A denominator theta factor vanishes (its argument lies on the lattice p^Z).
    #[error("pole hit in {context} at index {index}")]
    PoleHit { context: &'static str, index: i64 },

    #[error("balancing condition violated: relative defect {0:e}")]
    BalanceViolation(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The probed reconstruction does not reproduce the input: the function is not in W_c^n.
    #[error("degree overflow: reconstruction mismatch {mismatch:e} exceeds {threshold:e}")]
    DegreeOverflow { mismatch: f64, threshold: f64 },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("sampler exhausted for `{id}` after {retries} retries")]
    SamplerExhausted { id: String, retries: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
