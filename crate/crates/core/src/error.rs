use alloc::string::String;

/// Errors raised by trace validation and the detectors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("trace invariant violated at entry {index}: {reason}")]
    Invariant { index: usize, reason: String },

    #[error("index range [{start}, {end}] out of bounds for trace of length {len}")]
    Index { start: usize, end: usize, len: usize },

    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),

    #[error("empty tail set: no distinct screens after index {0}")]
    DivisionDomain(usize),

    #[error("region refers to unknown trace `{0}`")]
    UnknownTrace(String),

    #[error("invalid app model: {0}")]
    Model(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
