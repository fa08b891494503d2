use thiserror::Error;

/// Errors raised by the arithmetic layers and the engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field tower mismatch")]
    TowerMismatch,
    #[error("invalid field tower: {0}")]
    InvalidTower(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("negative exponent: {0}")]
    NegativeExponent(String),
    #[error("not a series under this transform: {0}")]
    NotASeries(String),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("integer overflow in lattice computation")]
    Overflow,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("value not certified at this truncation")]
    Uncertified,
    #[error("values differ: {0}")]
    UnequalValues(String),
    #[error("inconclusive order: {0}")]
    Inconclusive(String),
    #[error("step budget exhausted")]
    BudgetExhausted,
    #[error("residue not representable: {0}")]
    ResidueNotRepresentable(String),
    #[error("images formally dependent at budget: relation {0}")]
    FormallyDependent(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("outside the Laurent window: {0}")]
    OutsideWindow(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
