use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not squarefree")]
    NotSquarefree(u64),

    /// Primality is only certified up to 2^64.
    #[error("{0} exceeds the certified primality range (2^64)")]
    OutOfPrimalityRange(String),

    #[error("generators {0:?} are not independent modulo squares")]
    DependentGenerators(Vec<u64>),

    #[error("Q({sub}) is not a subfield of Q({field})")]
    NotSubfield { field: String, sub: String },

    #[error("degree {0} is outside the supported range")]
    UnsupportedDegree(usize),

    #[error("step budget of {0} exhausted")]
    BudgetExhausted(u64),

    #[error("base field has even class number {0}")]
    EvenClassNumber(u64),

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}
