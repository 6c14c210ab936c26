//! Competing p-selection rules run on the same scenario stream as the controller.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter::{normalized_deviation_db, LmpState, Sample, Scenario};
use crate::rl::{ActionGrid, ApiAgent, ApiConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineSpec {
    FixedP { p: f64 },
    /// `p` drawn uniformly from the grid at every step.
    RandomP { grid: ActionGrid, seed: u64 },
    Obr { alpha: f64, lambda: f64 },
}

impl BaselineSpec {
    pub fn label(&self) -> String {
        match self {
            Self::FixedP { p } => format!("lmp_p{p}"),
            Self::RandomP { .. } => "random_p".to_string(),
            Self::Obr { alpha, .. } => format!("obr_a{alpha}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FixedP { p } if !(1.0..=2.0).contains(&p) => {
                Err(invalid(format!("fixed exponent must lie in [1, 2], got {p}")))
            }
            Self::Obr { alpha, lambda } if !(alpha >= 0.0) || !(0.0..=1.0).contains(&lambda) => {
                Err(invalid("OBR needs alpha ≥ 0 and lambda in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Fixed-p for every grid value, random-p, and OBR with `alpha = 0.9`.
    pub fn standard_set(grid: &ActionGrid) -> Vec<Self> {
        let mut out: Vec<Self> = grid.values().iter().map(|&p| Self::FixedP { p }).collect();
        out.push(Self::RandomP {
            grid: grid.clone(),
            seed: 0,
        });
        out.push(Self::Obr {
            alpha: 0.9,
            lambda: 0.25,
        });
        out
    }
}

fn run_lmp<F>(scenario: &Scenario, rho: f64, mut choose: F) -> Result<Vec<f64>>
where
    F: FnMut(&Sample) -> f64,
{
    let mut filter = LmpState::zeros(scenario.config().dim, rho)?;
    scenario
        .stream()
        .map(|s| {
            let p = choose(&s);
            filter.update(&s.x, s.y, p)?;
            normalized_deviation_db(&filter.theta, scenario.theta_star(s.n))
        })
        .collect()
}

/// Per-step deviation (dB) of LMP with a constant exponent.
pub fn run_fixed_p(scenario: &Scenario, rho: f64, p: f64) -> Result<Vec<f64>> {
    if !(1.0..=2.0).contains(&p) {
        return Err(invalid(format!("fixed exponent must lie in [1, 2], got {p}")));
    }
    run_lmp(scenario, rho, |_| p)
}

/// Per-step deviation (dB) and the exponents drawn, for LMP with uniformly random `p`.
pub fn run_random_p_traced(
    scenario: &Scenario,
    rho: f64,
    grid: &ActionGrid,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut actions = Vec::with_capacity(scenario.config().n_total);
    let curve = run_lmp(scenario, rho, |_| {
        let p = grid.values()[rng.random_range(0..grid.len())];
        actions.push(p);
        p
    })?;
    Ok((curve, actions))
}

pub fn run_random_p(scenario: &Scenario, rho: f64, grid: &ActionGrid, seed: u64) -> Result<Vec<f64>> {
    run_random_p_traced(scenario, rho, grid, seed).map(|(c, _)| c)
}

/// Per-step deviation (dB) and chosen exponents of the policy-iteration controller.
pub fn run_api_traced(
    scenario: &Scenario,
    rho: f64,
    cfg: &ApiConfig,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut agent = ApiAgent::new(cfg.clone(), scenario.config().dim, rho, seed)?;
    let mut actions = Vec::with_capacity(scenario.config().n_total);
    let curve = scenario
        .stream()
        .map(|s| {
            actions.push(agent.step(&s.x, s.y)?.action);
            normalized_deviation_db(agent.theta(), scenario.theta_star(s.n))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((curve, actions))
}

pub fn run_api(scenario: &Scenario, rho: f64, cfg: &ApiConfig, seed: u64) -> Result<Vec<f64>> {
    run_api_traced(scenario, rho, cfg, seed).map(|(c, _)| c)
}

/// The controller run in its OBR configuration; state, loss and kernel settings are
/// taken from `base`.
pub fn run_obr(
    scenario: &Scenario,
    rho: f64,
    base: &ApiConfig,
    alpha: f64,
    lambda: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    run_api(scenario, rho, &base.obr(alpha, lambda), seed)
}
