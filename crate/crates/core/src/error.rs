use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("window length {window} does not fit in a sequence of length {n}")]
    WindowTooLong { window: usize, n: usize },

    #[error("position {pos} out of range 1..={max}")]
    OutOfRange { pos: usize, max: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance too large for exhaustive enumeration: m*n = {0} > 24")]
    TooLarge(usize),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("cell {cell} failed: {source}")]
    Cell { cell: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
