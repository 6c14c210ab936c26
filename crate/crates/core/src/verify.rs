//! Self-checks behind the `check` command: firm nonexpansivity, agreement of the
//! closed-form operator with its projection definition, and RFF kernel error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bellman::{apply_t, check_firm_nonexpansive, BellmanConfig, Hyperslab, QWeights};
use crate::error::Result;
use crate::rff::{gaussian_kernel, sample_rff};
use crate::vecops::{dot, norm_sq};

pub const NONEXPANSIVE_TOL: f64 = 1e-9;
pub const ORACLE_TOL: f64 = 1e-10;
pub const RFF_TOL: f64 = 0.03;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Random slabs with weights summing to one, plus the `(g, c_i)` that generated the
/// anchors `⟨g, h_i⟩ + α c_i`.
fn random_instance(
    rng: &mut ChaCha8Rng,
    alpha: f64,
) -> Result<(BellmanConfig, Vec<f64>, Vec<f64>)> {
    let dim = rng.random_range(1..=10);
    let count = rng.random_range(1..=3);
    let g = gaussian_vec(rng, dim, 1.0);
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut offsets = Vec::with_capacity(count);
    let mut slabs = Vec::with_capacity(count);
    for (i, w) in raw.iter().enumerate() {
        let spread = rng.random_range(0.2..3.0);
        let h = gaussian_vec(rng, dim, spread);
        let c: f64 = rng.sample(StandardNormal);
        let eps = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..0.5) };
        let weight = if i + 1 == count {
            1.0 - raw[..i].iter().map(|r| r / total).sum::<f64>()
        } else {
            w / total
        };
        slabs.push(Hyperslab::new(h.clone(), dot(&g, &h) + alpha * c, eps, weight.max(0.0))?);
        offsets.push(c);
    }
    Ok((BellmanConfig::new(alpha, slabs, true)?, g, offsets))
}

/// Euclidean projection onto `{u : |⟨u, h⟩ - c| ≤ ε}`.
fn project_slab(u: &[f64], h: &[f64], c: f64, eps: f64) -> Vec<f64> {
    let r = dot(u, h) - c;
    let shift = if r > eps {
        r - eps
    } else if r < -eps {
        r + eps
    } else {
        return u.to_vec();
    };
    let scale = shift / norm_sq(h);
    u.iter().zip(h).map(|(ui, hi)| ui - scale * hi).collect()
}

pub fn nonexpansivity(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = [0.1, 0.9, 5.0];
    let per_cfg = 20;
    let mut worst = f64::NEG_INFINITY;
    let configs = instances.div_ceil(per_cfg);
    for k in 0..configs {
        let (cfg, _, _) = random_instance(&mut rng, alphas[k % alphas.len()])?;
        worst = worst.max(check_firm_nonexpansive(&cfg, per_cfg, rng.random())?);
    }
    Ok(CheckOutcome {
        name: "firm nonexpansivity",
        passed: worst <= NONEXPANSIVE_TOL,
        detail: format!("max gap {worst:.3e} over {} pairs", configs * per_cfg),
    })
}

pub fn operator_oracle(instances: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let alpha = rng.random_range(0.05..5.0);
        let (cfg, g, offsets) = random_instance(&mut rng, alpha)?;
        let q = gaussian_vec(&mut rng, g.len(), 3.0);
        let u: Vec<f64> = q.iter().zip(&g).map(|(qi, gi)| (qi - gi) / alpha).collect();
        let mut expected = g.clone();
        for (slab, c) in cfg.slabs().iter().zip(&offsets) {
            let p = project_slab(&u, slab.direction(), *c, slab.tolerance());
            for (e, pi) in expected.iter_mut().zip(p) {
                *e += alpha * slab.weight() * pi;
            }
        }
        let got = apply_t(&cfg, &QWeights::from_vec(q.clone()))?;
        let scale = 1.0 + norm_sq(&q).sqrt();
        let err = got
            .as_slice()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err / scale);
    }
    Ok(CheckOutcome {
        name: "operator oracle",
        passed: worst <= ORACLE_TOL,
        detail: format!("max scaled error {worst:.3e} over {instances} instances"),
    })
}

pub fn rff_error(feature_dim: usize, pairs: usize, seed: u64) -> Result<CheckOutcome> {
    const DIM: usize = 6;
    let params = sample_rff(DIM, feature_dim, 1.0, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut total = 0.0;
    for _ in 0..pairs {
        let z1: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z2: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
        let approx = params.feature_map(&z1)?.dot(&params.feature_map(&z2)?);
        total += (approx - gaussian_kernel(&z1, &z2, 1.0)?).abs();
    }
    let mean = total / pairs as f64;
    Ok(CheckOutcome {
        name: "rff kernel error",
        passed: mean <= RFF_TOL,
        detail: format!("mean |error| {mean:.4} at D = {feature_dim} over {pairs} pairs"),
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        nonexpansivity(1000, seed)?,
        operator_oracle(200, seed.wrapping_add(1))?,
        rff_error(2000, 1000, seed.wrapping_add(2))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_lands_in_slab() {
        let h = [1.0, 2.0];
        let p = project_slab(&[5.0, 5.0], &h, 1.0, 0.5);
        assert!((dot(&p, &h) - 1.5).abs() < 1e-12);
        assert_eq!(project_slab(&[0.5, 0.0], &h, 1.0, 0.5), vec![0.5, 0.0]);
    }

    #[test]
    fn all_checks_pass() {
        for outcome in run_all(11).unwrap() {
            assert!(outcome.passed, "{outcome}");
        }
    }
}
