use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidParameter(String),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: u64, m: u64 },

    #[error("{target} is not a power of {base} modulo {modulus}")]
    NoSolution {
        base: u64,
        target: u64,
        modulus: u64,
    },

    #[error("{what} {value} exceeds the configured cap {cap}")]
    SizeCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("gcd(0, 0) is undefined")]
    UndefinedGcd,

    #[error("field elements belong to different field contexts")]
    ContextMismatch,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
