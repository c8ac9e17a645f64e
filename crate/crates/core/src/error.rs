use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} = {value} > {limit}")]
    Capacity {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("rejected root: {0}")]
    RejectedRoot(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    /// A sub-solver failure inside a scenario run.
    #[error("{operation} failed at {params}: {source}")]
    Scenario {
        operation: String,
        params: String,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code: 1 for validation failures, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Convergence { .. } | Error::RejectedRoot(_) => 2,
            Error::Scenario { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    /// Short machine-readable tag for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Capacity { .. } => "capacity",
            Error::Domain(_) => "domain",
            Error::Unsupported(_) => "unsupported",
            Error::Numeric(_) => "numeric",
            Error::Convergence { .. } => "convergence",
            Error::RejectedRoot(_) => "rejected_root",
            Error::Config(_) => "config",
            Error::Scenario { source, .. } => source.kind(),
            Error::Io(_) => "io",
        }
    }
}
