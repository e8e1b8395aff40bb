//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),

    #[error("inversion of zero in F_{0}")]
    DivisionByZero(u64),

    #[error("{what} overflows the integer budget")]
    Overflow { what: &'static str },

    #[error("operation needs {required} elementary steps, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("restriction target {target} exceeds size {class_size} of class {class}")]
    InvalidTarget {
        class: usize,
        class_size: usize,
        target: usize,
    },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("duplicate point at index {0}")]
    DuplicatePoints(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("malformed input at byte {offset}: {what}")]
    MalformedInput { offset: usize, what: String },

    #[error("parse error at line {line}: {what}")]
    ParseError { line: usize, what: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
