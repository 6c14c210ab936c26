use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Result};
use crate::vecops::{axpy, dot};

/// Residuals smaller than this skip the `|e|^{p-2}` factor for `p < 2`.
const SINGULAR_RESIDUAL: f64 = 1e-30;

/// Least-mean-p-power filter state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmpState {
    pub theta: Vec<f64>,
    pub rho: f64,
}

impl LmpState {
    pub fn new(theta: Vec<f64>, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!("learning rate must be positive, got {rho}")));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("initial estimate must be finite"));
        }
        Ok(Self { theta, rho })
    }

    pub fn zeros(dim: usize, rho: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], rho)
    }

    /// Prior error `y - θᵀx`.
    pub fn prior_error(&self, x: &[f64], y: f64) -> f64 {
        y - dot(&self.theta, x)
    }

    /// `θ ← θ + ρ p |e|^{p-2} e x`. Returns the prior error `e`.
    pub fn update(&mut self, x: &[f64], y: f64, p: f64) -> Result<f64> {
        check_len(self.theta.len(), x.len())?;
        if !(1.0..=2.0).contains(&p) {
            return Err(invalid(format!("exponent must lie in [1, 2], got {p}")));
        }
        let e = self.prior_error(x, y);
        let gain = if p == 2.0 {
            2.0 * e
        } else if e.abs() < SINGULAR_RESIDUAL {
            0.0
        } else {
            p * e.abs().powf(p - 1.0) * e.signum()
        };
        if gain != 0.0 {
            axpy(self.rho * gain, x, &mut self.theta);
        }
        Ok(e)
    }
}
