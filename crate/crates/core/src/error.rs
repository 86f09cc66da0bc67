use crate::coeff::Ring;

/// Errors raised by the calculus. Parse errors are kept apart from semantic
/// ones so the command line can report them with distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot combine coefficients over {0} and {1}")]
    RingMismatch(Ring, Ring),
    #[error("biarity mismatch: expected ({0}, {1}), found ({2}, {3})")]
    Biarity(usize, usize, usize, usize),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedGraph(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
