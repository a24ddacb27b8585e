use alloc::string::String;

/// Errors raised by the click-statistics core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A binomial coefficient outside the exact 64-bit range was requested.
    #[error("binomial C({n}, {k}) is outside the supported range n <= 64")]
    Overflow { n: u32, k: u32 },

    /// An iterative or alternating-sum computation lost too much accuracy.
    #[error("numerical error: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    /// Uncertainty propagation needs a finite trial count.
    #[error("missing trial count: {0}")]
    MissingTrials(String),

    /// The supplied data cannot determine the requested parameters.
    #[error("ill-posed fit: {0}")]
    IllPosed(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numerical {
            message: msg.into(),
            residual,
        }
    }

    /// True for failures of a computation rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
