//! Proximal Bellman mappings on random Fourier features, and an approximate policy
//! iteration controller that picks the exponent `p` of an LMP adaptive filter online.
//!
//! Layout:
//! - [`rff`]: Gaussian-kernel feature map.
//! - [`bellman`]: hyperslab-based proximal Bellman operator and KM iteration.
//! - [`rl`]: state features, replay buffer, hyperslab construction and the controller.
//! - [`filter`]: LMP filter and synthetic system-identification scenarios.
//! - [`baselines`]: fixed-p, random-p and OBR comparisons.
//! - [`harness`]: multi-trial experiments with CSV/manifest output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bellman;
pub mod error;
pub mod filter;
pub mod harness;
pub mod rff;
pub mod rl;
pub mod verify;

mod vecops;

pub use baselines::BaselineSpec;
pub use bellman::{apply_t, km_update, soft_threshold, BellmanConfig, Hyperslab, QWeights};
pub use error::{Error, Result};
pub use filter::{LmpState, OutlierModel, Scenario, ScenarioConfig};
pub use harness::{run_experiment, ExperimentConfig, ExperimentResult};
pub use rff::{feature_map, gaussian_kernel, sample_rff, FeatureVector, RffConfig, RffParams};
pub use rl::{api_step, ActionGrid, ApiAgent, ApiConfig, StateVector, Transition, Variant};
