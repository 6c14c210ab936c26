//! Proximal Bellman operator over hyperslab indicator functions.
//!
//! For slabs `H_i = {Q : |⟨Q, h_i⟩ - c_i| ≤ ε_i}` the operator
//! `TQ = g + α Σ w_i prox_{ι_{H_i}}((Q - g)/α)` collapses to
//!
//! ```text
//! TQ = Q - Σ_i w_i · soft_{α ε_i}(⟨Q, h_i⟩ - anchor_i) / ‖h_i‖² · h_i
//! ```
//!
//! where `anchor_i = ⟨g, h_i⟩ + α c_i` is the sampled one-step loss at the slab's
//! reference point. `T` is a convex combination of (shifted, scaled) projections and is
//! therefore firmly nonexpansive for every `α > 0`.
//!
//! Dropping the `1/‖h_i‖²` factor (the online Bellman-residual variant) loses that
//! guarantee once `‖h_i‖ > 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, invalid, Result};
use crate::rff::FeatureVector;
use crate::vecops::{axpy, dot, norm_sq};

/// Squared-norm threshold below which a slab direction is rejected.
pub const MIN_DIRECTION_NORM_SQ: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Linear Q-function in RFF coordinates: `Q(z) = ⟨w, φ̃(z)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QWeights(Vec<f64>);

impl QWeights {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn from_vec(w: Vec<f64>) -> Self {
        Self(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn evaluate(&self, phi: &FeatureVector) -> f64 {
        dot(&self.0, phi.as_slice())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|w| factor * w).collect())
    }
}

/// One hyperslab constraint of the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperslab {
    direction: Vec<f64>,
    direction_norm_sq: f64,
    anchor: f64,
    tolerance: f64,
    weight: f64,
}

impl Hyperslab {
    pub fn new(direction: Vec<f64>, anchor: f64, tolerance: f64, weight: f64) -> Result<Self> {
        let direction_norm_sq = norm_sq(&direction);
        if !(direction_norm_sq >= MIN_DIRECTION_NORM_SQ) {
            return Err(invalid(format!(
                "degenerate hyperslab direction (‖h‖² = {direction_norm_sq:e})"
            )));
        }
        if !anchor.is_finite() {
            return Err(invalid("hyperslab anchor must be finite"));
        }
        if !(tolerance >= 0.0) {
            return Err(invalid(format!("tolerance must be nonnegative, got {tolerance}")));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(invalid(format!("slab weight must lie in [0, 1], got {weight}")));
        }
        Ok(Self {
            direction,
            direction_norm_sq,
            anchor,
            tolerance,
            weight,
        })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn direction_norm_sq(&self) -> f64 {
        self.direction_norm_sq
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(invalid(format!("slab weight must lie in [0, 1], got {weight}")));
        }
        self.weight = weight;
        Ok(self)
    }

    /// `⟨q, h⟩ - anchor`.
    pub fn residual(&self, q: &[f64]) -> f64 {
        dot(q, &self.direction) - self.anchor
    }
}

/// Operator configuration: discount, slabs and the scaling switch.
#[derive(Debug, Clone, PartialEq)]
pub struct BellmanConfig {
    alpha: f64,
    slabs: Vec<Hyperslab>,
    apply_scaling: bool,
}

impl BellmanConfig {
    /// `alpha = 0` is accepted: the closed form stays well defined and reduces to
    /// averaged projections onto the hyperplanes `⟨Q, h_i⟩ = anchor_i`.
    pub fn new(alpha: f64, slabs: Vec<Hyperslab>, apply_scaling: bool) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("discount factor must be nonnegative, got {alpha}")));
        }
        if slabs.is_empty() {
            return Err(invalid("at least one hyperslab is required"));
        }
        let dim = slabs[0].direction.len();
        for s in &slabs[1..] {
            check_len(dim, s.direction.len())?;
        }
        let total: f64 = slabs.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(invalid(format!("slab weights must sum to 1, got {total}")));
        }
        Ok(Self {
            alpha,
            slabs,
            apply_scaling,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn slabs(&self) -> &[Hyperslab] {
        &self.slabs
    }

    pub fn apply_scaling(&self) -> bool {
        self.apply_scaling
    }

    pub fn dim(&self) -> usize {
        self.slabs[0].direction.len()
    }

    /// Applies `T` to a raw weight slice.
    pub fn apply(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), q.len())?;
        let mut out = q.to_vec();
        for slab in &self.slabs {
            if slab.weight == 0.0 {
                continue;
            }
            let shrunk = soft_threshold_unchecked(slab.residual(q), self.alpha * slab.tolerance);
            if shrunk == 0.0 {
                continue;
            }
            let step = if self.apply_scaling {
                slab.weight * shrunk / slab.direction_norm_sq
            } else {
                slab.weight * shrunk
            };
            axpy(-step, &slab.direction, &mut out);
        }
        Ok(out)
    }
}

#[inline]
fn soft_threshold_unchecked(xi: f64, gamma: f64) -> f64 {
    if xi > gamma {
        xi - gamma
    } else if xi < -gamma {
        xi + gamma
    } else {
        0.0
    }
}

/// Soft-thresholding `soft_γ(ξ)`.
pub fn soft_threshold(xi: f64, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid(format!("threshold must be nonnegative, got {gamma}")));
    }
    Ok(soft_threshold_unchecked(xi, gamma))
}

pub fn apply_t(cfg: &BellmanConfig, q: &QWeights) -> Result<QWeights> {
    cfg.apply(q.as_slice()).map(QWeights)
}

/// Krasnosel'skiĭ–Mann step `(1 - λ) q + λ T q`.
pub fn km_update(cfg: &BellmanConfig, q: &QWeights, lambda: f64) -> Result<QWeights> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("relaxation must lie in [0, 1], got {lambda}")));
    }
    let tq = cfg.apply(q.as_slice())?;
    Ok(QWeights(
        q.0.iter()
            .zip(&tq)
            .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
            .collect(),
    ))
}

/// `‖Tq1 - Tq2‖² - ⟨q1 - q2, Tq1 - Tq2⟩`; nonpositive for a firmly nonexpansive `T`.
pub fn firm_nonexpansive_gap(cfg: &BellmanConfig, q1: &[f64], q2: &[f64]) -> Result<f64> {
    let t1 = cfg.apply(q1)?;
    let t2 = cfg.apply(q2)?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..q1.len() {
        let dt = t1[i] - t2[i];
        lhs += dt * dt;
        rhs += (q1[i] - q2[i]) * dt;
    }
    Ok(lhs - rhs)
}

/// Largest firm-nonexpansivity gap over `trials` random pairs.
///
/// Pairs are drawn around the slab anchors at a scale that exercises both the flat and
/// the sloped parts of every soft threshold.
pub fn check_firm_nonexpansive(cfg: &BellmanConfig, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let dim = cfg.dim();
    let spread = cfg
        .slabs
        .iter()
        .map(|s| (s.anchor.abs() + cfg.alpha * s.tolerance + 1.0) / s.direction_norm_sq.sqrt())
        .fold(1.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let q1: Vec<f64> = (0..dim)
            .map(|_| spread * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let q2: Vec<f64> = if rng.random_bool(0.1) {
            // nearby pairs probe the kinks of the soft threshold
            q1.iter()
                .map(|v| v + 1e-3 * spread * rng.sample::<f64, _>(StandardNormal))
                .collect()
        } else {
            (0..dim)
                .map(|_| spread * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        worst = worst.max(firm_nonexpansive_gap(cfg, &q1, &q2)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::{dist_sq, norm};
    use rand::Rng;
    use proptest::prelude::*;

    fn slab(dir: &[f64], anchor: f64, eps: f64, w: f64) -> Hyperslab {
        Hyperslab::new(dir.to_vec(), anchor, eps, w).unwrap()
    }

    #[test]
    fn soft_threshold_pieces() {
        assert_eq!(soft_threshold(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(soft_threshold(2.0, 0.5).unwrap(), 1.5);
        assert_eq!(soft_threshold(-3.0, 1.0).unwrap(), -2.0);
        assert_eq!(soft_threshold(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(soft_threshold(-1.0, 1.0).unwrap(), 0.0);
        assert_eq!(soft_threshold(0.3, 0.0).unwrap(), 0.3);
        assert!(soft_threshold(1.0, -0.1).is_err());
    }

    #[test]
    fn soft_threshold_is_continuous_at_kinks() {
        for gamma in [0.0, 0.5, 3.0] {
            for edge in [gamma, -gamma] {
                let l = soft_threshold(edge - 1e-12, gamma).unwrap();
                let r = soft_threshold(edge + 1e-12, gamma).unwrap();
                assert!((l - r).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn construction_errors() {
        assert!(Hyperslab::new(vec![0.0, 0.0], 1.0, 0.0, 1.0).is_err());
        assert!(Hyperslab::new(vec![1e-7, 0.0], 1.0, 0.0, 1.0).is_err());
        assert!(Hyperslab::new(vec![1.0], 1.0, -0.1, 1.0).is_err());
        assert!(Hyperslab::new(vec![1.0], 1.0, 0.0, 1.5).is_err());
        let a = slab(&[1.0, 0.0], 0.0, 0.0, 0.5);
        assert!(BellmanConfig::new(0.9, vec![a.clone()], true).is_err());
        assert!(BellmanConfig::new(-0.1, vec![a.clone().with_weight(1.0).unwrap()], true).is_err());
        let b = slab(&[1.0, 0.0, 0.0], 0.0, 0.0, 0.5);
        assert!(BellmanConfig::new(0.9, vec![a.clone(), b], true).is_err());
        let cfg = BellmanConfig::new(0.9, vec![a.with_weight(1.0).unwrap()], true).unwrap();
        assert!(apply_t(&cfg, &QWeights::zeros(3)).is_err());
        assert!(km_update(&cfg, &QWeights::zeros(2), 1.5).is_err());
        assert!(km_update(&cfg, &QWeights::zeros(2), -0.5).is_err());
    }

    #[test]
    fn zero_residual_is_fixed() {
        let h1 = [1.0, 2.0, -1.0];
        let h2 = [0.5, 0.0, 3.0];
        let q = [0.3, -0.7, 1.1];
        let cfg = BellmanConfig::new(
            0.9,
            vec![slab(&h1, dot(&q, &h1), 0.0, 0.5), slab(&h2, dot(&q, &h2), 0.0, 0.5)],
            true,
        )
        .unwrap();
        assert_eq!(cfg.apply(&q).unwrap(), q.to_vec());
    }

    #[test]
    fn inside_band_is_fixed() {
        let h1 = [1.0, 2.0, -1.0];
        let h2 = [0.5, 0.0, 3.0];
        let q = [0.3, -0.7, 1.1];
        let alpha = 2.0;
        // residuals 0.15 and -0.09 with α ε = 0.2
        let cfg = BellmanConfig::new(
            alpha,
            vec![
                slab(&h1, dot(&q, &h1) - 0.15, 0.1, 0.3),
                slab(&h2, dot(&q, &h2) + 0.09, 0.1, 0.7),
            ],
            true,
        )
        .unwrap();
        assert_eq!(cfg.apply(&q).unwrap(), q.to_vec());
    }

    #[test]
    fn single_slab_lands_on_band_edge() {
        let h = [1.0, -2.0, 0.5];
        let cfg = BellmanConfig::new(0.5, vec![slab(&h, 4.0, 1.0, 1.0)], true).unwrap();
        let q = [10.0, 0.0, 0.0];
        let tq = cfg.apply(&q).unwrap();
        // residual 6 > α ε = 0.5, so the image sits on the upper face
        assert!((dot(&tq, &h) - 4.5).abs() < 1e-12);
    }

    #[test]
    fn km_endpoints() {
        let cfg = BellmanConfig::new(0.9, vec![slab(&[1.0, 1.0], 3.0, 0.0, 1.0)], true).unwrap();
        let q = QWeights::from_vec(vec![5.0, -1.0]);
        assert_eq!(km_update(&cfg, &q, 0.0).unwrap(), q);
        assert_eq!(km_update(&cfg, &q, 1.0).unwrap(), apply_t(&cfg, &q).unwrap());
    }

    #[test]
    fn identical_inputs_have_zero_gap() {
        let cfg = BellmanConfig::new(0.9, vec![slab(&[1.0, 1.0], 3.0, 0.1, 1.0)], true).unwrap();
        let q = [4.0, 7.0];
        assert_eq!(firm_nonexpansive_gap(&cfg, &q, &q).unwrap(), 0.0);
    }

    #[test]
    fn large_discount_still_firmly_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let slabs: Vec<Hyperslab> = (0..3)
                .map(|_| {
                    let d: Vec<f64> = (0..6).map(|_| rng.sample(StandardNormal)).collect();
                    slab(&d, rng.random_range(-5.0..5.0), rng.random_range(0.0..0.5), 1.0 / 3.0)
                })
                .collect();
            let cfg = BellmanConfig::new(5.0, slabs, true).unwrap();
            assert!(check_firm_nonexpansive(&cfg, 1000, 3).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn unscaled_variant_can_expand() {
        // ‖h‖² = 9: the unscaled step overshoots by a factor 9
        let cfg = BellmanConfig::new(0.9, vec![slab(&[3.0, 0.0], 0.0, 0.0, 1.0)], false).unwrap();
        let gap = check_firm_nonexpansive(&cfg, 200, 1).unwrap();
        assert!(gap > 0.0);
    }

    fn arb_cfg(dim: usize) -> impl Strategy<Value = (BellmanConfig, Vec<f64>, Vec<f64>)> {
        let slab_strat = (
            prop::collection::vec(-2.0f64..2.0, dim),
            -5.0f64..5.0,
            0.0f64..1.0,
            0.01f64..1.0,
        );
        (
            prop::collection::vec(slab_strat, 1..4),
            prop::sample::select(vec![0.1, 0.9, 5.0]),
            prop::collection::vec(-20.0f64..20.0, dim),
            prop::collection::vec(-20.0f64..20.0, dim),
        )
            .prop_filter_map("degenerate slab", |(raw, alpha, q1, q2)| {
                let total: f64 = raw.iter().map(|r| r.3).sum();
                let slabs = raw
                    .into_iter()
                    .map(|(d, a, e, w)| Hyperslab::new(d, a, e, w / total).ok())
                    .collect::<Option<Vec<_>>>()?;
                // renormalise away rounding in the weight sum
                let sum: f64 = slabs.iter().map(|s| s.weight()).sum();
                let n = slabs.len();
                let mut slabs = slabs;
                let last = slabs[n - 1].weight() + (1.0 - sum);
                slabs[n - 1] = slabs[n - 1].clone().with_weight(last.clamp(0.0, 1.0)).ok()?;
                let cfg = BellmanConfig::new(alpha, slabs, true).ok()?;
                Some((cfg, q1, q2))
            })
    }

    proptest! {
        #[test]
        fn firmly_nonexpansive((cfg, q1, q2) in arb_cfg(5)) {
            let gap = firm_nonexpansive_gap(&cfg, &q1, &q2).unwrap();
            prop_assert!(gap <= 1e-9, "gap {}", gap);
            let t1 = cfg.apply(&q1).unwrap();
            let t2 = cfg.apply(&q2).unwrap();
            prop_assert!(dist_sq(&t1, &t2).sqrt() <= norm(&crate::vecops::sub(&q1, &q2)) + 1e-9);
        }

        #[test]
        fn positive_homogeneous_in_shift((cfg, q1, _q2) in arb_cfg(4)) {
            // with every anchor at zero and no tolerance, T is linear in q
            let zeroed: Vec<Hyperslab> = cfg
                .slabs()
                .iter()
                .map(|s| Hyperslab::new(s.direction().to_vec(), 0.0, 0.0, s.weight()).unwrap())
                .collect();
            let lin = BellmanConfig::new(cfg.alpha(), zeroed, true).unwrap();
            let a = lin.apply(&q1).unwrap();
            let scaled: Vec<f64> = q1.iter().map(|v| 3.0 * v).collect();
            let b = lin.apply(&scaled).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((3.0 * x - y).abs() < 1e-9 * (1.0 + y.abs()));
            }
        }
    }
}
