use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("redundant random variable on Z_{modulus}: support lies in {subgroup}; re-root it onto the quotient")]
    Redundant { modulus: u64, subgroup: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("inconsistent embedding: {0}")]
    InconsistentEmbedding(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceGuard(_) => 3,
            _ => 2,
        }
    }
}
