use thiserror::Error;

use crate::field::FieldTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldTag, FieldTag),
    #[error("ring context mismatch")]
    RingMismatch,
    #[error("constant polynomial has no leader")]
    ConstantPolynomial,
    #[error("sequence is not autoreduced: {0}")]
    NotAutoreduced(String),
    #[error("reduction exceeded the step cap of {0}")]
    StepCapExceeded(usize),
    #[error("derivative order {order} exceeds the cap of {cap}")]
    OrderCapExceeded { order: u32, cap: u32 },
    #[error("system is not square: {equations} equations in {variables} variables")]
    NotSquare { equations: usize, variables: usize },
    #[error("brute-force Jacobi number supports n <= {max}, got n = {n}; use the assignment solver")]
    TooLargeForBruteForce { n: usize, max: usize },
    #[error("point is not a zero of {0}")]
    NotAZero(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
}

impl Error {
    /// Stable machine-readable code, surfaced by the command-line tool.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "E_DIV_ZERO",
            Error::FieldMismatch(..) => "E_FIELD_MISMATCH",
            Error::RingMismatch => "E_RING_MISMATCH",
            Error::ConstantPolynomial => "E_CONSTANT",
            Error::NotAutoreduced(_) => "E_NOT_AUTOREDUCED",
            Error::StepCapExceeded(_) => "E_STEP_CAP",
            Error::OrderCapExceeded { .. } => "E_ORDER_CAP",
            Error::NotSquare { .. } => "E_NOT_SQUARE",
            Error::TooLargeForBruteForce { .. } => "E_BRUTE_FORCE_SIZE",
            Error::NotAZero(_) => "E_NOT_A_ZERO",
            Error::InvalidPoint(_) => "E_INVALID_POINT",
            Error::Parse { .. } => "E_PARSE",
            Error::UnknownVariable(_) => "E_UNKNOWN_VARIABLE",
            Error::Format { .. } => "E_FORMAT",
            Error::InvalidRanking(_) => "E_RANKING",
        }
    }
}
