use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input text; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Well-formed input that violates an operation's precondition.
    #[error("{0}")]
    Input(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Error {
        Error::Input(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
