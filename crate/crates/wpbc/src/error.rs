use thiserror::Error;

/// Errors surfaced by the simulator and its allocators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible allocation: {0}")]
    Infeasible(String),

    #[error("degenerate estimate: {0}")]
    DegenerateEstimate(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
