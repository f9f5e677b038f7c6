use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "enumeration over 2^{exponent} sign assignments exceeds the limit of 2^{limit}; \
         raise the limit explicitly or use the heuristic oracle"
    )]
    Capacity { exponent: usize, limit: usize },

    #[error("data integrity check failed: {0}")]
    DataIntegrity(String),

    #[error("malformed content in {}: {message} (line {line}, {field})", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        field: String,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
