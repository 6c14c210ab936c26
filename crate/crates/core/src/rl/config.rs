use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rff::RffConfig;

/// Finite set of candidate exponents, sorted ascending inside `[1, 2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActionGrid(Vec<f64>);

impl ActionGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("action grid is empty"));
        }
        if values.iter().any(|p| !(1.0..=2.0).contains(p)) {
            return Err(invalid("action grid values must lie in [1, 2]"));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("action grid must be sorted ascending without duplicates"));
        }
        Ok(Self(values))
    }

    /// `{1, 1.25, 1.5, 1.75, 2}`.
    pub fn standard() -> Self {
        Self(vec![1.0, 1.25, 1.5, 1.75, 2.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn smallest(&self) -> f64 {
        self.0[0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: f64) -> bool {
        self.0.contains(&p)
    }
}

impl TryFrom<Vec<f64>> for ActionGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ActionGrid> for Vec<f64> {
    fn from(g: ActionGrid) -> Self {
        g.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Two scaled hyperslabs: local window plus one remote-past sample.
    Proximal,
    /// Online Bellman residual: one unscaled slab from the current transition only,
    /// zero tolerance, no replay.
    Obr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApiConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub w1: f64,
    pub w2: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Local sampling window `N_w`.
    pub window: usize,
    /// Kernel similarity threshold `c` for local sampling.
    pub similarity: f64,
    pub m_av: usize,
    pub varpi: f64,
    pub grid: ActionGrid,
    pub rff: RffConfig,
    /// Remote-past draws come from transitions at least this many steps old.
    pub remote_horizon: u64,
    pub buffer_capacity: usize,
    pub variant: Variant,
}

impl Default for ApiConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            lambda: 0.25,
            w1: 0.5,
            w2: 0.5,
            eps1: 0.0,
            eps2: 0.05,
            sigma1: 1e-3,
            sigma2: 0.0,
            window: 10,
            similarity: 0.95,
            m_av: 300,
            varpi: 0.3,
            grid: ActionGrid::standard(),
            rff: RffConfig::default(),
            remote_horizon: 500,
            buffer_capacity: 2000,
            variant: Variant::Proximal,
        }
    }
}

impl ApiConfig {
    /// OBR settings sharing this config's state, kernel and grid definitions.
    pub fn obr(&self, alpha: f64, lambda: f64) -> Self {
        Self {
            alpha,
            lambda,
            w1: 1.0,
            w2: 0.0,
            eps1: 0.0,
            sigma1: 0.0,
            variant: Variant::Obr,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        if !unit.contains(&self.lambda) {
            return Err(invalid(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if !unit.contains(&self.w1) || !unit.contains(&self.w2) {
            return Err(invalid("slab weights must lie in [0, 1]"));
        }
        if (self.w1 + self.w2 - 1.0).abs() > 1e-12 {
            return Err(invalid("slab weights must sum to 1"));
        }
        if !(self.eps1 >= 0.0 && self.eps2 >= 0.0) {
            return Err(invalid("tolerances must be nonnegative"));
        }
        if !(self.sigma1 >= 0.0 && self.sigma2 >= 0.0) {
            return Err(invalid("ridge parameters must be nonnegative"));
        }
        if !(self.similarity > 0.0 && self.similarity < 1.0) {
            return Err(invalid("similarity threshold must lie in (0, 1)"));
        }
        if self.m_av == 0 {
            return Err(invalid("m_av must be positive"));
        }
        if !(self.varpi > 0.0 && self.varpi < 1.0) {
            return Err(invalid("varpi must lie in (0, 1)"));
        }
        if self.rff.feature_dim == 0 || !(self.rff.bandwidth > 0.0) {
            return Err(invalid("feature dimension and bandwidth must be positive"));
        }
        if self.buffer_capacity == 0 {
            return Err(invalid("buffer capacity must be positive"));
        }
        Ok(())
    }
}
