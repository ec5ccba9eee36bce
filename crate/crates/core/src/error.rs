use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square and non-empty")]
    NotSquare,

    #[error("matrix {index} has determinant zero")]
    SingularMatrix { index: usize },

    #[error("matrix {index}: gcd(|det| = {det}, n = {base}) = {gcd}, letters would not be permuted")]
    NotCoprime {
        index: usize,
        det: BigInt,
        base: u32,
        gcd: BigInt,
    },

    #[error("matrix is not invertible over the integers (det = {0})")]
    NotUnimodular(BigInt),

    #[error("zero matrix has an empty state box")]
    ZeroMatrix,

    #[error("no matrices given")]
    EmptyMatrixList,

    #[error("resource limit: {what} = {value} exceeds cap {cap}")]
    Resource {
        what: &'static str,
        value: String,
        cap: u64,
    },

    #[error("value {0} does not fit in {1} digits")]
    DoesNotFit(BigInt, usize),

    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u32 },

    #[error("unknown state {0}")]
    UnknownState(String),

    #[error("state id {0} out of range")]
    StateOutOfRange(u32),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
