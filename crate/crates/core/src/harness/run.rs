use rayon::prelude::*;

use super::config::{ExperimentConfig, TrialSeeds};
use super::output::{emit_csv, write_file, Manifest};
use crate::baselines::{run_api, run_fixed_p, run_obr, run_random_p, BaselineSpec};
use crate::error::{invalid, Error, Result};
use crate::filter::{Scenario, ScenarioConfig};

/// Per-step deviation curves (dB) of every method for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub seeds: TrialSeeds,
    pub curves: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub labels: Vec<String>,
    /// Trial-averaged curves, one per label.
    pub curves: Vec<Vec<f64>>,
    pub trials: Vec<TrialResult>,
}

impl ExperimentResult {
    pub fn curve(&self, label: &str) -> Option<&[f64]> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(&self.curves[i])
    }

    pub fn seeds(&self) -> Vec<TrialSeeds> {
        self.trials.iter().map(|t| t.seeds.clone()).collect()
    }

    pub fn csv_bytes(&self, decimation: usize) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        emit_csv(&mut buf, &self.labels, &self.curves, decimation)?;
        Ok(buf)
    }
}

pub fn run_trial(cfg: &ExperimentConfig, index: usize) -> Result<TrialResult> {
    let seeds = TrialSeeds::derive(cfg.master_seed, index, 1 + cfg.baselines.len());
    let scenario = Scenario::generate(&ScenarioConfig {
        seed: seeds.scenario,
        ..cfg.scenario.clone()
    })?;
    let mut curves = Vec::with_capacity(seeds.methods.len());
    curves.push(run_api(&scenario, cfg.rho, &cfg.api, seeds.methods[0])?);
    for (spec, &seed) in cfg.baselines.iter().zip(&seeds.methods[1..]) {
        curves.push(match spec {
            BaselineSpec::FixedP { p } => run_fixed_p(&scenario, cfg.rho, *p)?,
            // the baseline's own seed offsets the derived one so two random-p entries can differ
            BaselineSpec::RandomP { grid, seed: offset } => {
                run_random_p(&scenario, cfg.rho, grid, seed ^ offset)?
            }
            BaselineSpec::Obr { alpha, lambda } => {
                run_obr(&scenario, cfg.rho, &cfg.api, *alpha, *lambda, seed)?
            }
        });
    }
    Ok(TrialResult { seeds, curves })
}

/// Runs all trials on a pool of `workers` threads; results come back in trial order.
pub fn run_trials(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<TrialResult>> {
    cfg.validate()?;
    if workers == 0 {
        return Err(invalid("workers must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<TrialResult>> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect());
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Trial {
                index,
                seed: TrialSeeds::derive(cfg.master_seed, index, 0).scenario,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Uniform average over trials, step by step.
pub fn average_curves(trials: &[TrialResult]) -> Result<Vec<Vec<f64>>> {
    let first = trials.first().ok_or_else(|| invalid("no trials to average"))?;
    let scale = 1.0 / trials.len() as f64;
    let mut acc: Vec<Vec<f64>> = first.curves.iter().map(|c| vec![0.0; c.len()]).collect();
    for t in trials {
        if t.curves.len() != acc.len() {
            return Err(invalid("trials report different method counts"));
        }
        for (a, c) in acc.iter_mut().zip(&t.curves) {
            if a.len() != c.len() {
                return Err(invalid("trials report different curve lengths"));
            }
            for (ai, ci) in a.iter_mut().zip(c) {
                *ai += ci;
            }
        }
    }
    for a in &mut acc {
        a.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(acc)
}

/// Runs every trial, averages, and writes `deviation.csv` and `manifest.json` into
/// `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let trials = run_trials(cfg, workers)?;
    let result = ExperimentResult {
        labels: cfg.labels(),
        curves: average_curves(&trials)?,
        trials,
    };
    write_file(&dir.join("deviation.csv"), &result.csv_bytes(cfg.decimation)?)?;
    let seeds = result.seeds();
    let manifest = Manifest {
        build_id: super::BUILD_ID,
        config: cfg,
        methods: result.labels.clone(),
        trial_seeds: &seeds,
    };
    write_file(&dir.join("manifest.json"), manifest.to_json().as_bytes())?;
    Ok(result)
}
