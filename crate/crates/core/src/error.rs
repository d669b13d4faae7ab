use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance not connected")]
    Disconnected,

    #[error("terminal-induced subgraph is not connected")]
    TerminalsDisconnected,

    #[error("{what} = {actual} exceeds the limit {limit}; lower {what} or raise the cap")]
    CapExceeded { what: &'static str, actual: usize, limit: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("instance is not {0}")]
    WrongClass(&'static str),

    #[error("LP is infeasible")]
    Infeasible,

    #[error("LP is unbounded")]
    Unbounded,

    #[error("LP has an irrational coefficient but was requested over the rationals")]
    IrrationalCoefficient,

    #[error("solution failed verification: {0}")]
    VerificationFailed(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
