use thiserror::Error;

/// Errors produced by the voting-power library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid union: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} of {size} exceeds the limit of {limit}{hint}")]
    Size {
        what: &'static str,
        size: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    /// True for the size-limit variant, which callers may want to route to an
    /// approximate method instead.
    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::Size { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
