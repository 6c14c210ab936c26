//! State features built from the data stream.
//!
//! ```text
//! s1 = log10 (y_n - θ_nᵀx_n)²
//! s2 = mean_{m ≤ M} log10 [(y_{n-m} - θ_nᵀx_{n-m})² / ‖x_{n-m}‖²]
//! s3 = log10 ‖x_n‖
//! s4 = ϖ s4_prev + (1 - ϖ) log10 (‖θ_n - θ_{n-1}‖ / ρ)
//! ```

use std::collections::VecDeque;

use crate::error::{invalid, Result};
use crate::vecops::{dist_sq, dot, norm_sq};

/// Arguments of `log10` are clamped from below to this value.
pub const LOG_FLOOR: f64 = 1e-30;

pub fn log10_floored(v: f64) -> f64 {
    v.max(LOG_FLOOR).log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

impl StateVector {
    pub fn as_array(&self) -> [f64; 4] {
        [self.s1, self.s2, self.s3, self.s4]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
struct Pair {
    x: Vec<f64>,
    y: f64,
    x_norm_sq: f64,
}

/// The most recent `capacity` input/output pairs, newest first.
#[derive(Debug, Clone)]
pub struct PairHistory {
    pairs: VecDeque<Pair>,
    capacity: usize,
}

impl PairHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            pairs: VecDeque::with_capacity(capacity),
            capacity: capacity.max(1),
        }
    }

    pub fn push(&mut self, x: &[f64], y: f64) {
        if self.pairs.len() == self.capacity {
            self.pairs.pop_back();
        }
        self.pairs.push_front(Pair {
            x: x.to_vec(),
            y,
            x_norm_sq: norm_sq(x),
        });
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

/// Window average of normalized log posterior losses over the `m_av` newest pairs,
/// evaluated with `theta`. Fewer pairs are averaged while the window fills up.
pub fn one_step_loss(history: &PairHistory, theta: &[f64], m_av: usize) -> Result<f64> {
    if history.is_empty() {
        return Err(invalid("one-step loss needs at least one past pair"));
    }
    if m_av == 0 {
        return Err(invalid("averaging window must be positive"));
    }
    let used = m_av.min(history.len());
    let sum: f64 = history
        .pairs
        .iter()
        .take(used)
        .map(|p| {
            let r = p.y - dot(theta, &p.x);
            log10_floored(r * r) - log10_floored(p.x_norm_sq)
        })
        .sum();
    Ok(sum / used as f64)
}

/// `log10(‖θ_1 - θ_0‖ / ρ)` for an LMP step with exponent `p0`, written in terms of the
/// first state features: `log10 p0 + (p0 - 1) log10|e_0| + s3`.
pub fn initial_s4(p0: f64, s1: f64, s3: f64) -> f64 {
    p0.log10() + (p0 - 1.0) * 0.5 * s1 + s3
}

#[derive(Debug, Clone, Copy)]
pub enum S4Input<'a> {
    /// No previous estimate exists; seed `s4` from the first action `p0`.
    Initial { p0: f64 },
    Recursive { theta_prev: &'a [f64], prev_s4: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct StateParams {
    pub m_av: usize,
    pub varpi: f64,
    pub rho: f64,
}

impl StateParams {
    fn validate(&self) -> Result<()> {
        if self.m_av == 0 {
            return Err(invalid("averaging window must be positive"));
        }
        if !(self.varpi > 0.0 && self.varpi < 1.0) {
            return Err(invalid(format!("smoothing factor must lie in (0, 1), got {}", self.varpi)));
        }
        if !(self.rho > 0.0) {
            return Err(invalid("learning rate must be positive"));
        }
        Ok(())
    }
}

/// Builds `s_n` from the current pair `(x, y)`, the past pairs in `history` and the
/// current estimate `theta_now`.
///
/// With an empty history `s2` falls back to the current pair's normalized prior loss.
pub fn compute_state(
    history: &PairHistory,
    x: &[f64],
    y: f64,
    theta_now: &[f64],
    s4_input: S4Input<'_>,
    params: StateParams,
) -> Result<StateVector> {
    params.validate()?;
    crate::error::check_len(theta_now.len(), x.len())?;
    let e = y - dot(theta_now, x);
    let x_norm_sq = norm_sq(x);
    let s1 = log10_floored(e * e);
    let s2 = if history.is_empty() {
        s1 - log10_floored(x_norm_sq)
    } else {
        one_step_loss(history, theta_now, params.m_av)?
    };
    let s3 = log10_floored(x_norm_sq.sqrt());
    let s4 = match s4_input {
        S4Input::Initial { p0 } => initial_s4(p0, s1, s3),
        S4Input::Recursive {
            theta_prev,
            prev_s4,
        } => {
            crate::error::check_len(theta_now.len(), theta_prev.len())?;
            let moved = dist_sq(theta_now, theta_prev).sqrt();
            params.varpi * prev_s4 + (1.0 - params.varpi) * log10_floored(moved / params.rho)
        }
    };
    Ok(StateVector { s1, s2, s3, s4 })
}
