//! Multi-trial orchestration, trial averaging, CSV and manifest output.

mod config;
mod output;
mod run;

pub use config::{derive_seed, ExperimentConfig, TrialSeeds};
pub use output::{emit_csv, format_sig6, write_csv, Manifest, DEFAULT_DECIMATION};
pub use run::{average_curves, run_experiment, run_trial, run_trials, ExperimentResult, TrialResult};

/// `git describe`-style identifier of the build, or `"unknown"` outside a checkout.
pub const BUILD_ID: &str = env!("PROXBELL_BUILD_ID");

/// Label of the policy-iteration controller's column.
pub const API_LABEL: &str = "api";
