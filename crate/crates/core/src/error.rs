use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is rank deficient (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    Singular { sigma_min: f64, sigma_max: f64 },

    #[error("configuration outside system domain: {0}")]
    Domain(String),

    #[error("trajectory left the working ball at t = {t}: norm {norm:e} > radius {radius:e}")]
    BallExit { t: f64, norm: f64, radius: f64 },

    #[error("step {dt:e} violates the stiffness limit {limit:e} = 1/(10 alpha)")]
    Stiffness { dt: f64, limit: f64 },

    #[error("inertia matrix is not positive definite at q = {state:?}")]
    NotPositiveDefinite { state: Vec<f64> },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario `{context}`: {source}")]
    Scenario {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numeric,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidConfig(_) | Error::Dimension(_) => ErrorCategory::Config,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Scenario { source, .. } => source.category(),
            _ => ErrorCategory::Numeric,
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub fn in_scenario(self, context: impl Into<String>) -> Self {
        Error::Scenario {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
