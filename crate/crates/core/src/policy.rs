use serde::{Deserialize, Serialize};

use crate::error::{NumError, Result};

/// Tolerances and budgets governing an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    pub target_abs_tol: f64,
    pub target_rel_tol: f64,
    pub max_terms: usize,
    pub max_precision_digits: u32,
    pub quad_max_levels: u32,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            target_abs_tol: 1e-15,
            target_rel_tol: 1e-12,
            max_terms: 8192,
            max_precision_digits: 120,
            quad_max_levels: 10,
        }
    }
}

impl EvalPolicy {
    pub fn new(
        target_abs_tol: f64,
        target_rel_tol: f64,
        max_terms: usize,
        max_precision_digits: u32,
        quad_max_levels: u32,
    ) -> Result<Self> {
        let policy = EvalPolicy {
            target_abs_tol,
            target_rel_tol,
            max_terms,
            max_precision_digits,
            quad_max_levels,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
        if !in_unit(self.target_abs_tol) || !in_unit(self.target_rel_tol) {
            return Err(NumError::domain(format!(
                "tolerances must lie in (0, 1), got abs={} rel={}",
                self.target_abs_tol, self.target_rel_tol
            )));
        }
        if self.max_terms < 64 {
            return Err(NumError::domain("max_terms must be at least 64"));
        }
        if self.max_precision_digits < 16 {
            return Err(NumError::domain("max_precision_digits must be at least 16"));
        }
        if self.quad_max_levels == 0 {
            return Err(NumError::domain("quad_max_levels must be positive"));
        }
        Ok(())
    }

    /// Same policy with both tolerances replaced.
    pub fn with_tolerances(mut self, abs: f64, rel: f64) -> Self {
        self.target_abs_tol = abs;
        self.target_rel_tol = rel;
        self
    }

    /// Acceptable absolute error for a result of magnitude `value`.
    pub fn target_for(&self, value: f64) -> f64 {
        self.target_abs_tol.max(value.abs() * self.target_rel_tol)
    }
}

/// A computed value with its error estimate and evaluation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub value: f64,
    pub abs_err_est: f64,
    pub terms_used: usize,
    pub precision_digits_used: u32,
    pub nodes_evaluated: usize,
    pub converged: bool,
}

impl Approx {
    /// An exactly known value.
    pub fn exact(value: f64) -> Self {
        Approx {
            value,
            abs_err_est: 0.0,
            terms_used: 0,
            precision_digits_used: 16,
            nodes_evaluated: 0,
            converged: true,
        }
    }

    pub(crate) fn meets(&self, policy: &EvalPolicy) -> bool {
        self.abs_err_est <= policy.target_for(self.value)
    }
}
