//! Approximate policy iteration that picks the LMP exponent online.
//!
//! Per time step the controller builds a 4-feature state from the data stream, chooses
//! `p` greedily from the current Q-function, advances the LMP filter, turns recent and
//! replayed transitions into hyperslabs, and relaxes Q toward the proximal Bellman
//! operator those slabs define.

mod agent;
mod buffer;
mod config;
mod policy;
mod ridge;
mod sampling;
mod slab;
mod state;

pub use agent::{api_step, ApiAgent, StepReport, STATE_ACTION_DIM};
pub use buffer::{ReplayBuffer, Transition};
pub use config::{ActionGrid, ApiConfig, Variant};
pub use policy::{greedy_action, q_value, state_action};
pub use ridge::ridge_coefficients;
pub use sampling::{local_sampling, remote_past_sample};
pub use slab::{build_hyperslab, SlabKind};
pub use state::{
    compute_state, initial_s4, log10_floored, one_step_loss, PairHistory, S4Input, StateParams,
    StateVector, LOG_FLOOR,
};
