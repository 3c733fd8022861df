use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied arguments that do not fit the operation.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input refers to undeclared names or breaks a structural invariant.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("graph is cyclic: {}", .cycle.join(" -> "))]
    CyclicGraph { cycle: Vec<String> },

    #[error("unsupported graph shape: {0}")]
    UnsupportedShape(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid degree {0}: must lie in [0, 1]")]
    InvalidDegree(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }
}
