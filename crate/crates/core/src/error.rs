use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("precision exhausted after {obtained} terms at {bits} bits")]
    PrecisionExhausted { obtained: usize, bits: u32 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("no convergent index satisfies the reduction inequalities for {candidate}")]
    Counterexample { candidate: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("undefined state: {0}")]
    UndefinedState(String),

    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
