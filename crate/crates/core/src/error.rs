use thiserror::Error;

/// Errors raised by the counting pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector system is empty")]
    EmptySystem,

    #[error("zero vector in system")]
    ZeroVector,

    #[error("vector system has rank {rank}, ambient dimension is {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("vectors do not span a pointed cone")]
    NotPointed,

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("relation coefficient {index} is zero")]
    ZeroCoefficient { index: usize },

    /// The evaluation point lies on (or numerically near) a pole. Retry with
    /// another point.
    #[error("evaluation point is singular for denominator {vector}")]
    SingularPoint { vector: String },

    #[error("integer overflow converting to machine integers")]
    Overflow,

    #[error("reduction exceeded the limit of {limit} terms")]
    TermLimit { limit: usize },
}

impl Error {
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::SingularPoint { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
