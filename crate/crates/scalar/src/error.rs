use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
    #[error("coordinate index {index} out of range for chart dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown coordinate `{name}` at position {pos}")]
    UnknownCoordinate { pos: usize, name: String },
    #[error("resource budget exceeded: expression of {size} terms exceeds limit {limit}")]
    Budget { size: usize, limit: usize },
}
