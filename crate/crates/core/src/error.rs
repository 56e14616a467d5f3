use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("conditioning event has probability zero")]
    NullEvent,

    #[error("support sizes differ: {left} vs {right}")]
    SupportMismatch { left: usize, right: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("graph contains a cycle through vertex `{0}`")]
    Cycle(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, value: impl ToString, range: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_string(),
        range,
    }
}
