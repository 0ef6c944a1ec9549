use thiserror::Error;

/// Errors produced by model evaluation, configuration, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fell outside its admissible range. Carries the first
    /// offending field name.
    #[error("parameter `{0}` out of range")]
    Range(&'static str),

    /// An operation was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent run or shock-process configuration.
    #[error("config error: {0}")]
    Config(String),

    /// The stage-3 first-order condition has no sign change on (0, 1).
    /// Reports the maximum residual attained and where.
    #[error("no FOC root on (0, 1): max residual {max_residual} at x = {at}")]
    NoRoot { max_residual: f64, at: f64 },

    /// Fertility never reaches 1 for any population level (gamma < p).
    #[error("no population threshold: fertility stays below 1 for all L")]
    NoThreshold,

    /// A finite-difference step changed the root structure, so the
    /// derivative is undefined at the requested point.
    #[error("perturbation changed root structure: {0}")]
    Perturbation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
