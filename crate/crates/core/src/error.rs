use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An exact enumeration would need more terms than the configured budget.
    #[error("enumeration needs {terms} terms, budget is {budget}")]
    Budget { terms: f64, budget: u64 },

    /// A function was evaluated outside its domain.
    #[error("{what}: argument {x} outside domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        x: f64,
        lo: f64,
        hi: f64,
    },

    /// A parameter violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),

    #[error("unknown series `{0}`")]
    UnknownSeries(String),

    /// A bracketed root search was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {flo}, f(hi) = {fhi})")]
    NoBracket {
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    #[error("all blocks lie on the boundary; stationarity residual undefined")]
    NoInteriorBlocks,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
