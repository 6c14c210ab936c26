//! Gaussian kernel and its random-Fourier-feature approximation.
//!
//! The Gaussian kernel `k(z, z') = exp(-‖z - z'‖² / (2 σ²))` is shift invariant, so by
//! Bochner's theorem it is the characteristic function of `N(0, σ⁻² I)`. Drawing
//! frequencies `v_k ~ N(0, σ⁻² I)` and phases `b_k ~ U[0, 2π)` gives the feature map
//!
//! ```text
//! φ̃(z) = sqrt(2 / D) [cos(v_1ᵀz + b_1), …, cos(v_Dᵀz + b_D)]
//! ```
//!
//! with `E[φ̃(z)ᵀφ̃(z')] = k(z, z')`. All Q-functions in this crate live in the
//! `D`-dimensional span of these features.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Result};
use crate::vecops::{dist_sq, dot};

/// Feature dimension used when none is configured.
pub const DEFAULT_FEATURE_DIM: usize = 1000;
/// Kernel bandwidth used when none is configured.
pub const DEFAULT_BANDWIDTH: f64 = 0.5;

/// Sampled frequencies and phases of an RFF map. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct RffParams {
    /// Row-major `d_f × dim_z` matrix; row `k` is `v_k`.
    frequencies: Vec<f64>,
    phases: Vec<f64>,
    bandwidth: f64,
    dim_z: usize,
    seed: u64,
}

/// Image of a point under the RFF map.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Feature-map settings carried in experiment configs; the seed comes from the trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RffConfig {
    pub feature_dim: usize,
    pub bandwidth: f64,
}

impl Default for RffConfig {
    fn default() -> Self {
        Self {
            feature_dim: DEFAULT_FEATURE_DIM,
            bandwidth: DEFAULT_BANDWIDTH,
        }
    }
}

/// Draws an RFF map for inputs of length `dim_z` with `d_f` features.
pub fn sample_rff(dim_z: usize, d_f: usize, bandwidth: f64, seed: u64) -> Result<RffParams> {
    if dim_z == 0 {
        return Err(invalid("dim_z must be positive"));
    }
    if d_f == 0 {
        return Err(invalid("feature dimension must be positive"));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / bandwidth;
    let frequencies = (0..d_f * dim_z)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let phases = (0..d_f).map(|_| rng.random::<f64>() * TAU).collect();
    Ok(RffParams {
        frequencies,
        phases,
        bandwidth,
        dim_z,
        seed,
    })
}

impl RffParams {
    pub fn from_config(dim_z: usize, cfg: &RffConfig, seed: u64) -> Result<Self> {
        sample_rff(dim_z, cfg.feature_dim, cfg.bandwidth, seed)
    }

    pub fn dim_z(&self) -> usize {
        self.dim_z
    }

    pub fn feature_dim(&self) -> usize {
        self.phases.len()
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frequency(&self, k: usize) -> &[f64] {
        &self.frequencies[k * self.dim_z..(k + 1) * self.dim_z]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Zeroes all phases. Only meaningful for tests of the `cos(0) = 1` corner.
    pub fn with_zero_phases(mut self) -> Self {
        self.phases.iter_mut().for_each(|b| *b = 0.0);
        self
    }

    pub fn feature_map(&self, z: &[f64]) -> Result<FeatureVector> {
        check_len(self.dim_z, z.len())?;
        Ok(self.map_unchecked(z))
    }

    /// Feature maps of `[prefix; t]` for every `t` in `trailing`, sharing the prefix
    /// projection. Bit-identical to calling [`Self::feature_map`] on each point.
    pub fn map_with_trailing(&self, prefix: &[f64], trailing: &[f64]) -> Result<Vec<FeatureVector>> {
        check_len(self.dim_z, prefix.len() + 1)?;
        let d = self.dim_z;
        let amp = (2.0 / self.feature_dim() as f64).sqrt();
        let base: Vec<f64> = self
            .frequencies
            .chunks_exact(d)
            .map(|v| dot(&v[..d - 1], prefix))
            .collect();
        Ok(trailing
            .iter()
            .map(|&t| {
                let values = self
                    .frequencies
                    .chunks_exact(d)
                    .zip(&base)
                    .zip(&self.phases)
                    .map(|((v, acc), b)| amp * ((acc + v[d - 1] * t) + b).cos())
                    .collect();
                FeatureVector(values)
            })
            .collect())
    }

    pub(crate) fn map_unchecked(&self, z: &[f64]) -> FeatureVector {
        let amp = (2.0 / self.feature_dim() as f64).sqrt();
        let values = self
            .frequencies
            .chunks_exact(self.dim_z)
            .zip(&self.phases)
            .map(|(v, b)| amp * (dot(v, z) + b).cos())
            .collect();
        FeatureVector(values)
    }
}

/// Free-function form of [`RffParams::feature_map`].
pub fn feature_map(params: &RffParams, z: &[f64]) -> Result<FeatureVector> {
    params.feature_map(z)
}

/// Exact Gaussian kernel `exp(-‖z - z'‖² / (2 bandwidth²))`.
pub fn gaussian_kernel(z: &[f64], z_prime: &[f64], bandwidth: f64) -> Result<f64> {
    check_len(z.len(), z_prime.len())?;
    if !(bandwidth > 0.0) {
        return Err(invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    Ok((-dist_sq(z, z_prime) / (2.0 * bandwidth * bandwidth)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn shape_contract() {
        let p = sample_rff(5, 300, 1.0, 7).unwrap();
        assert_eq!(p.feature_dim(), 300);
        assert_eq!(p.dim_z(), 5);
        assert_eq!(p.frequencies.len(), 1500);
        assert_eq!(p.phases().len(), 300);
        assert!(p.phases().iter().all(|b| (0.0..TAU).contains(b)));
    }

    #[test]
    fn same_seed_same_params() {
        assert_eq!(sample_rff(5, 300, 1.0, 7).unwrap(), sample_rff(5, 300, 1.0, 7).unwrap());
        assert_ne!(sample_rff(5, 300, 1.0, 7).unwrap(), sample_rff(5, 300, 1.0, 8).unwrap());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sample_rff(5, 0, 1.0, 7).is_err());
        assert!(sample_rff(5, 10, 0.0, 7).is_err());
        assert!(sample_rff(5, 10, -1.0, 7).is_err());
        let p = sample_rff(5, 10, 1.0, 7).unwrap();
        assert!(p.feature_map(&[0.0; 4]).is_err());
        assert!(gaussian_kernel(&[0.0; 2], &[0.0; 3], 1.0).is_err());
    }

    #[test]
    fn zero_input_with_zero_phases_is_constant() {
        let p = sample_rff(5, 300, 1.0, 7).unwrap().with_zero_phases();
        let phi = p.feature_map(&[0.0; 5]).unwrap();
        let amp = (2.0f64 / 300.0).sqrt();
        assert!(phi.as_slice().iter().all(|&v| (v - amp).abs() < 1e-15));
    }

    #[test]
    fn frequency_spread_matches_bandwidth() {
        let p = sample_rff(1, 20_000, 2.0, 3).unwrap();
        let var = p.frequencies.iter().map(|v| v * v).sum::<f64>() / 20_000.0;
        // std of each component should be 1/bandwidth
        assert!((var - 0.25).abs() < 0.01, "var = {var}");
    }

    #[test]
    fn kernel_values() {
        assert_eq!(gaussian_kernel(&[1.0, 2.0], &[1.0, 2.0], 0.3).unwrap(), 1.0);
        // ‖z - z'‖² = 2
        assert_relative_eq!(
            gaussian_kernel(&[1.0, 0.0], &[0.0, 1.0], 1.0).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        let mut last = 1.0;
        for r in 1..40 {
            let k = gaussian_kernel(&[0.0], &[r as f64 * 0.25], 1.0).unwrap();
            assert!(k < last && k > 0.0 || k == 0.0);
            last = k;
        }
        assert!(last < 1e-20);
    }

    #[test]
    fn trailing_batch_is_bit_identical() {
        let p = sample_rff(5, 50, 1.3, 2).unwrap();
        let prefix = [0.3, -2.0, 0.7, 1.9];
        let batch = p.map_with_trailing(&prefix, &[1.0, 1.25, 2.0]).unwrap();
        for (phi, t) in batch.iter().zip([1.0, 1.25, 2.0]) {
            let mut z = prefix.to_vec();
            z.push(t);
            assert_eq!(phi, &p.feature_map(&z).unwrap());
        }
        assert!(p.map_with_trailing(&prefix[..3], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn features_are_bounded(z in prop::collection::vec(-50.0f64..50.0, 5), seed in 0u64..1000) {
            let p = sample_rff(5, 64, 0.7, seed).unwrap();
            let phi = p.feature_map(&z).unwrap();
            let bound = (2.0f64 / 64.0).sqrt() + 1e-15;
            prop_assert!(phi.as_slice().iter().all(|v| v.abs() <= bound));
            prop_assert!(phi.dot(&phi) <= 2.0 + 1e-12);
        }

        #[test]
        fn kernel_is_symmetric(
            z in prop::collection::vec(-5.0f64..5.0, 4),
            w in prop::collection::vec(-5.0f64..5.0, 4),
            bw in 0.1f64..10.0,
        ) {
            let a = gaussian_kernel(&z, &w, bw).unwrap();
            let b = gaussian_kernel(&w, &z, bw).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a >= 0.0);
            prop_assert!(a <= 1.0);
        }
    }
}
