use super::config::ActionGrid;
use super::state::StateVector;
use crate::bellman::QWeights;
use crate::error::Result;
use crate::rff::{FeatureVector, RffParams};

/// `z = [s1, s2, s3, s4, p]`.
pub fn state_action(s: &StateVector, p: f64) -> [f64; 5] {
    [s.s1, s.s2, s.s3, s.s4, p]
}

pub fn q_value(q: &QWeights, rff: &RffParams, s: &StateVector, p: f64) -> Result<f64> {
    Ok(q.evaluate(&rff.feature_map(&state_action(s, p))?))
}

/// Features of `(s, p)` for every `p` in the grid.
pub(crate) fn grid_features(
    rff: &RffParams,
    s: &StateVector,
    grid: &ActionGrid,
) -> Result<Vec<FeatureVector>> {
    rff.map_with_trailing(&s.as_array(), grid.values())
}

/// Index into `features` of the smallest Q-value; ties go to the lower index.
pub(crate) fn argmin_index(q: &QWeights, features: &[FeatureVector]) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, phi) in features.iter().enumerate() {
        let v = q.evaluate(phi);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Greedy policy `argmin_p Q(s, p)` over the grid, ties broken toward the smallest `p`.
pub fn greedy_action(q: &QWeights, s: &StateVector, grid: &ActionGrid, rff: &RffParams) -> Result<f64> {
    let features = grid_features(rff, s, grid)?;
    Ok(grid.values()[argmin_index(q, &features)])
}
