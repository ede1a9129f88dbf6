use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e} after {panels} panels")]
    Convergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("kernel tail not certifiable at N = {n}; best-effort value {best_effort:e}")]
    TailNotCertifiable { n: usize, best_effort: f64 },

    #[error("degree cap exceeded: need degree {needed}, space provides {cap}")]
    DegreeCap { needed: usize, cap: usize },

    #[error("operator norm iteration did not converge after {iterations} steps (estimate {estimate:e})")]
    NormNotConverged { iterations: usize, estimate: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
