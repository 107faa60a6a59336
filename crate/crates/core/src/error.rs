use thiserror::Error;

/// Errors raised by the torus, kernel and verification primitives.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("modulus mismatch: expected {expected}, got {got}")]
    ModulusMismatch { expected: u32, got: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("exact mode unavailable for this norm: {0}")]
    NotRationalClosed(String),
    #[error("ratio undefined: denominator is zero ({0})")]
    ZeroDenominator(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("work budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("index {index} outside table of size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
