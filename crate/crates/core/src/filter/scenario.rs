//! Synthetic system-identification streams `y_n = θ*ᵀx_n + v_n + o_n`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::stable::AlphaStable;
use crate::error::{invalid, Result};
use crate::vecops::{dot, norm_sq};

// Independent ChaCha streams per random source, so that e.g. switching the outlier
// model leaves inputs and noise untouched.
const STREAM_SYSTEM: u64 = 0;
const STREAM_INPUT: u64 = 1;
const STREAM_NOISE: u64 = 2;
const STREAM_OUTLIER: u64 = 3;
const STREAM_PLACEMENT: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutlierModel {
    /// An α-stable outlier at every time instance.
    AlphaStable { alpha: f64, beta: f64, scale: f64 },
    /// Uniform outliers on `[low, high]` at exactly `round(rate · n_total)` instants,
    /// chosen without replacement.
    Sparse { rate: f64, low: f64, high: f64 },
    None,
}

impl OutlierModel {
    pub fn default_alpha_stable() -> Self {
        Self::AlphaStable {
            alpha: 1.0,
            beta: 0.5,
            scale: 1.0,
        }
    }

    pub fn default_sparse() -> Self {
        Self::Sparse {
            rate: 0.1,
            low: -100.0,
            high: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Filter length `L`.
    pub dim: usize,
    pub n_total: usize,
    /// `None` means noiseless.
    pub snr_db: Option<f64>,
    pub outliers: OutlierModel,
    /// Samples with `n > change_time` see a freshly drawn system.
    pub change_time: Option<usize>,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            n_total: 40_000,
            snr_db: Some(30.0),
            outliers: OutlierModel::default_sparse(),
            change_time: Some(20_000),
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid("filter dimension must be positive"));
        }
        if let Some(t) = self.change_time {
            if t > self.n_total {
                return Err(invalid(format!(
                    "change time {t} exceeds stream length {}",
                    self.n_total
                )));
            }
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() {
                return Err(invalid("snr_db is NaN"));
            }
        }
        match self.outliers {
            OutlierModel::AlphaStable { alpha, beta, scale } => {
                AlphaStable::new(alpha, beta, scale)?;
            }
            OutlierModel::Sparse { rate, low, high } => {
                if !(0.0..=1.0).contains(&rate) {
                    return Err(invalid(format!("outlier rate must lie in [0, 1], got {rate}")));
                }
                if !(low <= high) {
                    return Err(invalid("sparse outlier range is empty"));
                }
            }
            OutlierModel::None => {}
        }
        Ok(())
    }
}

/// One observation. `n` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub n: usize,
    pub x: Vec<f64>,
    pub y: f64,
    pub noise: f64,
    pub outlier: f64,
    /// Index into [`Scenario::systems`].
    pub segment: usize,
}

/// Hidden systems and outlier placement for one seeded scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    cfg: ScenarioConfig,
    systems: Vec<Vec<f64>>,
    noise_std: Vec<f64>,
    outlier_at: Vec<bool>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Scenario {
    pub fn generate(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let mut sys_rng = stream_rng(cfg.seed, STREAM_SYSTEM);
        let segments = if cfg.change_time.is_some() { 2 } else { 1 };
        let systems: Vec<Vec<f64>> = (0..segments)
            .map(|_| {
                (0..cfg.dim)
                    .map(|_| sys_rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        // E[(θ*ᵀx)²] = ‖θ*‖² for x ~ N(0, I)
        let noise_std = systems
            .iter()
            .map(|s| match cfg.snr_db {
                Some(snr) => (norm_sq(s) / 10f64.powf(snr / 10.0)).sqrt(),
                None => 0.0,
            })
            .collect();
        let mut outlier_at = vec![false; cfg.n_total];
        match cfg.outliers {
            OutlierModel::Sparse { rate, .. } => {
                let count = (rate * cfg.n_total as f64).round() as usize;
                let mut rng = stream_rng(cfg.seed, STREAM_PLACEMENT);
                for i in index::sample(&mut rng, cfg.n_total, count.min(cfg.n_total)) {
                    outlier_at[i] = true;
                }
            }
            OutlierModel::AlphaStable { .. } => outlier_at.iter_mut().for_each(|o| *o = true),
            OutlierModel::None => {}
        }
        Ok(Self {
            cfg: cfg.clone(),
            systems,
            noise_std,
            outlier_at,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn systems(&self) -> &[Vec<f64>] {
        &self.systems
    }

    pub fn segment_at(&self, n: usize) -> usize {
        match self.cfg.change_time {
            Some(t) if n > t => 1,
            _ => 0,
        }
    }

    /// System active at 1-based time `n`.
    pub fn theta_star(&self, n: usize) -> &[f64] {
        &self.systems[self.segment_at(n)]
    }

    pub fn outlier_count(&self) -> usize {
        self.outlier_at.iter().filter(|&&o| o).count()
    }

    pub fn noise_std(&self, segment: usize) -> f64 {
        self.noise_std[segment]
    }

    /// A fresh pass over the samples; every call yields the identical sequence.
    pub fn stream(&self) -> ScenarioStream<'_> {
        ScenarioStream {
            scenario: self,
            n: 0,
            input: stream_rng(self.cfg.seed, STREAM_INPUT),
            noise: stream_rng(self.cfg.seed, STREAM_NOISE),
            outlier: stream_rng(self.cfg.seed, STREAM_OUTLIER),
        }
    }
}

pub struct ScenarioStream<'a> {
    scenario: &'a Scenario,
    n: usize,
    input: ChaCha8Rng,
    noise: ChaCha8Rng,
    outlier: ChaCha8Rng,
}

impl Iterator for ScenarioStream<'_> {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        let sc = self.scenario;
        if self.n >= sc.cfg.n_total {
            return None;
        }
        self.n += 1;
        let n = self.n;
        let segment = sc.segment_at(n);
        let x: Vec<f64> = (0..sc.cfg.dim)
            .map(|_| self.input.sample::<f64, _>(StandardNormal))
            .collect();
        let std = sc.noise_std[segment];
        let noise = if std > 0.0 {
            std * self.noise.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        let outlier = if sc.outlier_at[n - 1] {
            match sc.cfg.outliers {
                OutlierModel::Sparse { low, high, .. } => self.outlier.random_range(low..=high),
                OutlierModel::AlphaStable { alpha, beta, scale } => {
                    // validated in `generate`
                    AlphaStable { alpha, beta, scale }.sample(&mut self.outlier)
                }
                OutlierModel::None => 0.0,
            }
        } else {
            0.0
        };
        let y = dot(&sc.systems[segment], &x) + noise + outlier;
        Some(Sample {
            n,
            x,
            y,
            noise,
            outlier,
            segment,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.scenario.cfg.n_total - self.n;
        (left, Some(left))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(outliers: OutlierModel) -> ScenarioConfig {
        ScenarioConfig {
            dim: 8,
            n_total: 1000,
            snr_db: Some(30.0),
            outliers,
            change_time: Some(500),
            seed: 42,
        }
    }

    #[test]
    fn noiseless_clean_stream_is_exact() {
        let cfg = ScenarioConfig {
            snr_db: None,
            ..small(OutlierModel::None)
        };
        let sc = Scenario::generate(&cfg).unwrap();
        for s in sc.stream() {
            assert_eq!(s.y, dot(sc.theta_star(s.n), &s.x));
        }
    }

    #[test]
    fn reproducible_per_seed() {
        let cfg = small(OutlierModel::default_alpha_stable());
        let a: Vec<Sample> = Scenario::generate(&cfg).unwrap().stream().collect();
        let b: Vec<Sample> = Scenario::generate(&cfg).unwrap().stream().collect();
        assert_eq!(a, b);
        let other = ScenarioConfig { seed: 43, ..cfg };
        let c: Vec<Sample> = Scenario::generate(&other).unwrap().stream().collect();
        assert_ne!(a[0].x, c[0].x);
    }

    #[test]
    fn system_changes_after_change_time() {
        let sc = Scenario::generate(&small(OutlierModel::None)).unwrap();
        assert_eq!(sc.theta_star(500), sc.systems()[0].as_slice());
        assert_eq!(sc.theta_star(501), sc.systems()[1].as_slice());
        assert_ne!(sc.systems()[0], sc.systems()[1]);
    }

    #[test]
    fn sparse_outliers_hit_exact_fraction() {
        let cfg = ScenarioConfig {
            n_total: 40_000,
            change_time: None,
            ..small(OutlierModel::default_sparse())
        };
        let sc = Scenario::generate(&cfg).unwrap();
        assert_eq!(sc.outlier_count(), 4000);
        let hits: Vec<Sample> = sc.stream().filter(|s| s.outlier != 0.0).collect();
        assert_eq!(hits.len(), 4000);
        // Binomial(40000, 0.1) has σ = 60
        assert!((hits.len() as f64 - 4000.0).abs() <= 180.0);
        assert!(hits.iter().all(|s| (-100.0..=100.0).contains(&s.outlier)));
    }

    #[test]
    fn measured_snr_matches_target() {
        let cfg = ScenarioConfig {
            dim: 10,
            n_total: 100_000,
            snr_db: Some(30.0),
            outliers: OutlierModel::None,
            change_time: None,
            seed: 3,
        };
        let sc = Scenario::generate(&cfg).unwrap();
        let (mut sig, mut noise) = (0.0, 0.0);
        for s in sc.stream() {
            sig += dot(sc.theta_star(s.n), &s.x).powi(2);
            noise += s.noise * s.noise;
        }
        let snr = 10.0 * (sig / noise).log10();
        assert!((snr - 30.0).abs() < 0.5, "snr = {snr}");
    }

    #[test]
    fn rejects_invalid_configs() {
        let mut cfg = small(OutlierModel::None);
        cfg.change_time = Some(5000);
        assert!(Scenario::generate(&cfg).is_err());
        let cfg = small(OutlierModel::Sparse {
            rate: 1.5,
            low: 0.0,
            high: 1.0,
        });
        assert!(Scenario::generate(&cfg).is_err());
        let cfg = ScenarioConfig {
            dim: 0,
            ..small(OutlierModel::None)
        };
        assert!(Scenario::generate(&cfg).is_err());
    }
}
