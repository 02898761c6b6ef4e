use thiserror::Error;

use crate::continuation::PoleReport;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition (bad depth, q outside (0,1), m = n, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The series requested is outside the region where its direct expansion converges.
    #[error("outside convergence region: {0}")]
    Convergence(String),

    /// The point lies on (or numerically too close to) a pole hyperplane.
    #[error("pole: {message}")]
    Pole {
        message: String,
        report: Option<Box<PoleReport>>,
    },

    /// The argument lies in the singular set of a q-polylogarithm (prod z_i = q^{-m}).
    #[error("singular set: {0}")]
    Singular(String),

    /// An extrapolation or summation did not settle within the configured budget.
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn pole(message: impl Into<String>) -> Self {
        Error::Pole {
            message: message.into(),
            report: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
