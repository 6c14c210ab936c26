use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::output::DEFAULT_DECIMATION;
use crate::baselines::BaselineSpec;
use crate::error::{invalid, Error, Result};
use crate::filter::ScenarioConfig;
use crate::rl::{ActionGrid, ApiConfig};

/// Full description of one experiment. Missing keys in a JSON file take the defaults,
/// which are the full-scale setting (L = 100, 40000 steps, 100 trials).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    /// LMP learning rate shared by every method.
    pub rho: f64,
    pub api: ApiConfig,
    pub baselines: Vec<BaselineSpec>,
    pub trials: usize,
    pub master_seed: u64,
    pub decimation: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let api = ApiConfig::default();
        Self {
            scenario: ScenarioConfig::default(),
            rho: 1e-3,
            baselines: BaselineSpec::standard_set(&api.grid),
            api,
            trials: 100,
            master_seed: 0,
            decimation: DEFAULT_DECIMATION,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    /// Desk-scale variant: L = 20, 5000 steps, 10 trials, system change halfway.
    pub fn scaled() -> Self {
        let base = Self::default();
        Self {
            scenario: ScenarioConfig {
                dim: 20,
                n_total: 5000,
                change_time: Some(2500),
                ..base.scenario
            },
            trials: 10,
            ..base
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.api.validate()?;
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(invalid(format!("rho must be positive, got {}", self.rho)));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.decimation == 0 {
            return Err(invalid("decimation must be at least 1"));
        }
        for b in &self.baselines {
            b.validate()?;
        }
        let mut labels: Vec<String> = self.labels();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("two methods share the same label"));
        }
        Ok(())
    }

    /// Column labels in output order: the controller first, then baselines as listed.
    pub fn labels(&self) -> Vec<String> {
        std::iter::once(super::API_LABEL.to_string())
            .chain(self.baselines.iter().map(BaselineSpec::label))
            .collect()
    }

    pub fn grid(&self) -> &ActionGrid {
        &self.api.grid
    }
}

/// Seeds of one trial: the scenario stream and one per method (controller first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub index: usize,
    pub scenario: u64,
    pub methods: Vec<u64>,
}

/// `component`-th seed of trial `trial`. Trial `t` reads its own ChaCha stream, so the
/// seeds of earlier trials do not depend on how many trials are run.
pub fn derive_seed(master: u64, trial: usize, component: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial as u64);
    rng.set_word_pos(2 * component as u128);
    rng.random()
}

impl TrialSeeds {
    pub fn derive(master: u64, index: usize, methods: usize) -> Self {
        Self {
            index,
            scenario: derive_seed(master, index, 0),
            methods: (1..=methods).map(|k| derive_seed(master, index, k)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), cfg);
        assert_eq!(cfg.scenario.dim, 100);
        assert_eq!(cfg.rho, 1e-3);
        assert_eq!(cfg.labels().len(), 8);
    }

    #[test]
    fn partial_json_keeps_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"trials": 3, "api": {"alpha": 0.5}}"#).unwrap();
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.api.alpha, 0.5);
        assert_eq!(cfg.api.lambda, 0.25);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_json(r#"{"trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"rho": -1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"decimation": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let dup = r#"{"baselines": [{"kind": "fixed_p", "p": 2}, {"kind": "fixed_p", "p": 2}]}"#;
        assert!(ExperimentConfig::from_json(dup).is_err());
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = TrialSeeds::derive(7, 3, 4);
        assert_eq!(a, TrialSeeds::derive(7, 3, 4));
        let mut all = vec![a.scenario];
        all.extend(&a.methods);
        for t in 0..20 {
            let s = TrialSeeds::derive(7, t, 4);
            if t != 3 {
                all.push(s.scenario);
                all.extend(&s.methods);
            }
        }
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
        assert_ne!(derive_seed(7, 0, 0), derive_seed(8, 0, 0));
    }
}
