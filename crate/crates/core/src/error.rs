//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Malformed input text; `token` is the offending fragment.
    #[error("parse error at `{token}`: {msg}")]
    Parse { token: String, msg: String },

    /// Parameters outside the mathematical domain (e.g. non-integrable weight).
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or series evaluation failed to reach its tolerance.
    #[error("numeric error: {msg} (achieved tolerance {achieved:.3e})")]
    Numeric { msg: String, achieved: f64 },

    /// A sequence refused to settle; carries the observed tail.
    #[error("non-convergent sequence: {msg}; tail = {tail:?}")]
    NonConvergent { msg: String, tail: Vec<f64> },

    /// A power series needed more coefficients than were precomputed.
    #[error("truncation: series needs more than {n_max} coefficients (try at least {suggested})")]
    Truncation { n_max: usize, suggested: usize },

    /// An operation's stated precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub fn parse(token: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse { token: token.into(), msg: msg.into() }
    }

    pub fn numeric(msg: impl Into<String>, achieved: f64) -> Self {
        Error::Numeric { msg: msg.into(), achieved }
    }
}
