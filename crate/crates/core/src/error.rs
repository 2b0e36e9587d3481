use std::io;

/// Errors surfaced by plane construction, file ingestion, kernel contracts,
/// registry configuration, and the task executor.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Requested dimensions overflow the addressable size.
    #[error("allocation error: {0}")]
    Allocation(String),

    /// An operation precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input bytes or text do not form a valid resource.
    #[error("format error: {0}")]
    Format(String),

    /// A requested configuration is not available on this host.
    #[error("configuration error: {0}")]
    Config(String),

    /// A work item panicked inside the wavefront executor.
    #[error("task {node} panicked during execution")]
    TaskPanicked { node: u32 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
