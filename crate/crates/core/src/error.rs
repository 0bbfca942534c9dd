use thiserror::Error;

/// Errors raised by the simulation and oracle routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("{what} has size {size}, above the limit {limit}")]
    SizeGuard {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("no transition is possible from the current state")]
    NoTransition,

    #[error("linear system is singular at row {0}")]
    SingularSystem(usize),

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("inconsistent ancestry at generation {generation}: {reason}")]
    InconsistentAncestry { generation: usize, reason: String },

    #[error("event limit of {0} reached before the sample coalesced")]
    EventLimit(u64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
