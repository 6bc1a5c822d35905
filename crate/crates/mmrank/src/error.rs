use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid format: {0}")]
    InvalidFormat(String),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("format mismatch: {0}")]
    FormatMismatch(String),

    #[error("incompatible formats: {0}")]
    IncompatibleFormats(String),

    #[error("not a flip: {0}")]
    NotAFlip(String),

    #[error("not a reduction: {0}")]
    NotAReduction(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unrecognized convention or broken scheme")]
    UnrecognizedConvention,

    #[error("refusing to search from broken scheme")]
    BrokenStart,

    /// The linearized Brent system has no solution when lifting from
    /// modulus 2^k to 2^(k+1).
    #[error("obstructed at 2^{}", k + 1)]
    Obstructed { k: u32 },

    #[error("coefficients not stabilized")]
    NotStabilized,

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("selector out of range: {0}")]
    SelectorOutOfRange(String),

    #[error("{0}")]
    Pipeline(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            msg: msg.to_string(),
        }
    }
}
