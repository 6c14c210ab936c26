use super::buffer::Transition;
use super::config::ApiConfig;
use super::policy::{argmin_index, grid_features, state_action};
use super::ridge::ridge_coefficients;
use crate::bellman::{Hyperslab, QWeights};
use crate::error::Result;
use crate::rff::RffParams;
use crate::vecops::axpy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlabKind {
    /// Current transition plus kernel-similar recent ones.
    Local,
    /// A single replayed transition.
    Remote,
}

/// Hyperslab from a reference transition and its companion samples.
///
/// ```text
/// h      = φ̃(z_ref) - α Σ_j d_j φ̃(s'_j, μ(s'_j))
/// anchor = g(z_ref)
/// ```
///
/// `μ` is greedy with respect to `q`; `d` is the ridge fit of `φ̃(z_ref)` on the
/// sampled state-action features `φ̃(z_j)` (reference first).
pub fn build_hyperslab(
    reference: &Transition,
    others: &[Transition],
    q: &QWeights,
    rff: &RffParams,
    cfg: &ApiConfig,
    kind: SlabKind,
) -> Result<Hyperslab> {
    let (sigma, tolerance, weight) = match kind {
        SlabKind::Local => (cfg.sigma1, cfg.eps1, cfg.w1),
        SlabKind::Remote => (cfg.sigma2, cfg.eps2, cfg.w2),
    };
    let samples: Vec<&Transition> = std::iter::once(reference).chain(others).collect();
    let columns = samples
        .iter()
        .map(|t| rff.feature_map(&state_action(&t.state, t.action)))
        .collect::<Result<Vec<_>>>()?;
    let mut direction = columns[0].as_slice().to_vec();
    if cfg.alpha != 0.0 {
        let d = ridge_coefficients(&columns, sigma)?;
        for (t, dj) in samples.iter().zip(&d) {
            let next = grid_features(rff, &t.next_state, &cfg.grid)?;
            let best = argmin_index(q, &next);
            axpy(-cfg.alpha * dj, next[best].as_slice(), &mut direction);
        }
    }
    Hyperslab::new(direction, reference.one_step_loss, tolerance, weight)
}
