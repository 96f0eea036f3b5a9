use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix failed one of the density-operator or unitary invariants.
    #[error("validation failed ({invariant}): {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unknown circuit '{name}'; valid names: {valid}")]
    UnknownCircuit { name: String, valid: String },

    /// No output state exists: the postselection has zero probability.
    #[error("dynamical consistency paradox: Tr(P rho P^dag) = {trace:e}")]
    Paradox { trace: f64 },

    #[error("still paradoxical: <Phi|chi|Phi> has trace {trace:e}")]
    StillParadoxical { trace: f64 },

    #[error("degenerate noisy consistency condition: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
