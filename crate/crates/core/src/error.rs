use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("outside model-case region: {0}")]
    OutsideModelRegion(String),

    #[error("single-sign precondition violated: input mixes positive and negative values")]
    MixedSign,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("transition row {row} is not stochastic (sum {sum})")]
    NotStochastic { row: usize, sum: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
