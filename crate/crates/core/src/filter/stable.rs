//! Chambers–Mallows–Stuck sampler for α-stable laws.
//!
//! Parameterization is `S(α, β, σ, 0)` in the Samorodnitsky–Taqqu ("S1") convention:
//! `α = 2, β = 0` is `N(0, 2σ²)` and `α = 1, β = 0` is Cauchy with scale `σ`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaStable {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
}

impl AlphaStable {
    pub fn new(alpha: f64, beta: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid(format!("stability index must lie in (0, 2], got {alpha}")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(invalid(format!("skewness must lie in [-1, 1], got {beta}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { alpha, beta, scale })
    }

    /// Standardized draw (`σ = 1`) from uniform angle `v ∈ (-π/2, π/2)` and `w ~ Exp(1)`.
    fn standard(&self, v: f64, w: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        if a == 1.0 {
            let shifted = FRAC_PI_2 + b * v;
            (shifted * v.tan() - b * ((FRAC_PI_2 * w * v.cos()) / shifted).ln()) / FRAC_PI_2
        } else {
            let t = b * (PI * a / 2.0).tan();
            let offset = t.atan() / a;
            let scale = (1.0 + t * t).powf(1.0 / (2.0 * a));
            let av = a * (v + offset);
            scale * av.sin() / v.cos().powf(1.0 / a)
                * ((v - av).cos() / w).powf((1.0 - a) / a)
        }
    }
}

impl Distribution<f64> for AlphaStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // open interval: the endpoints map to infinities
        let v = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break PI * (u - 0.5);
            }
        };
        let w: f64 = Exp1.sample(rng);
        let x = self.standard(v, w);
        if self.alpha == 1.0 {
            self.scale * x + 2.0 / PI * self.beta * self.scale * self.scale.ln()
        } else {
            self.scale * x
        }
    }
}

/// One draw from `S(alpha_s, beta_s, sigma_s, 0)`.
pub fn alpha_stable_sample<R: Rng + ?Sized>(
    alpha_s: f64,
    beta_s: f64,
    sigma_s: f64,
    rng: &mut R,
) -> Result<f64> {
    Ok(AlphaStable::new(alpha_s, beta_s, sigma_s)?.sample(rng))
}
