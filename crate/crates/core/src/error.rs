use crate::policy::Approx;

/// Errors raised by every evaluator in the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum NumError {
    /// Arguments or parameters outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A budget ran out before the tolerance was met. `partial` carries the
    /// best available value with `converged == false`.
    #[error("convergence error: {reason}")]
    Convergence { reason: String, partial: Approx },
}

impl NumError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        NumError::Domain(msg.into())
    }

    pub(crate) fn convergence(reason: impl Into<String>, partial: Approx) -> Self {
        NumError::Convergence {
            reason: reason.into(),
            partial,
        }
    }

    pub fn is_domain(&self) -> bool {
        matches!(self, NumError::Domain(_))
    }

    /// The partially converged value carried by a convergence failure.
    pub fn partial(&self) -> Option<&Approx> {
        match self {
            NumError::Convergence { partial, .. } => Some(partial),
            NumError::Domain(_) => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, NumError>;
