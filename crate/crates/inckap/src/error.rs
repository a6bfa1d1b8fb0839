use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad indices, invalid parameters,
    /// structurally broken instances).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The request is valid but exceeds an exhaustive-computation limit.
    #[error("capability limit exceeded: {0}")]
    CapabilityLimit(String),

    /// A flow value or similar target that the instance cannot attain.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        Error::CapabilityLimit(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
