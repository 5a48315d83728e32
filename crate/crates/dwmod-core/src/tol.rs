//! Numeric tolerances governing every equality and feasibility decision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance knobs used across the crate.
///
/// `tol_eig` bounds eigensolver residuals, `tol_eq` decides norm equalities,
/// `tol_feas` decides state-feasibility residuals, and `max_iter` caps both
/// Jacobi sweeps and projected-gradient iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub tol_eig: f64,
    pub tol_eq: f64,
    pub tol_feas: f64,
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_eig: 1e-12,
            tol_eq: 1e-9,
            tol_feas: 1e-7,
            max_iter: 5000,
        }
    }
}

impl ToleranceConfig {
    /// Checks that every tolerance is strictly positive and `tol_eig <= tol_feas`.
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_eig > 0.0 && self.tol_eq > 0.0 && self.tol_feas > 0.0) {
            return Err(Error::InvalidTolerance(
                "tolerances must be strictly positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidTolerance("max_iter must be positive".into()));
        }
        if self.tol_eig > self.tol_feas {
            return Err(Error::InvalidTolerance(
                "tol_eig must not exceed tol_feas".into(),
            ));
        }
        Ok(())
    }
}
