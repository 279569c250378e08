use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("the generated subgroup has infinite index")]
    InfiniteIndex,

    #[error("the steps generate the whole group (index 1); no counterexample exists")]
    GeneratingSet,

    #[error("empty valid window for the stencil")]
    EmptyValidWindow,

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("tuple count {count} exceeds the cap {cap}")]
    TooManyTuples { count: u128, cap: u128 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
