use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::buffer::{ReplayBuffer, Transition};
use super::config::{ApiConfig, Variant};
use super::policy::greedy_action;
use super::sampling::{local_sampling, remote_past_sample};
use super::slab::{build_hyperslab, SlabKind};
use super::state::{compute_state, one_step_loss, PairHistory, S4Input, StateParams, StateVector};
use crate::bellman::{km_update, BellmanConfig, Hyperslab, QWeights};
use crate::error::{check_len, Result};
use crate::filter::LmpState;
use crate::rff::RffParams;

/// Width of the state-action vector `[s1, s2, s3, s4, p]`.
pub const STATE_ACTION_DIM: usize = 5;

const STREAM_FEATURES: u64 = 0;
const STREAM_REPLAY: u64 = 1;

/// What one call to [`ApiAgent::step`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub n: u64,
    pub state: StateVector,
    pub action: f64,
    pub prior_error: f64,
    /// Number of hyperslabs in this step's operator (0 on the very first step).
    pub slabs: usize,
}

/// Runtime state of the online p-selection controller.
#[derive(Debug, Clone)]
pub struct ApiAgent {
    cfg: ApiConfig,
    rff: RffParams,
    q: QWeights,
    filter: LmpState,
    theta_prev: Option<Vec<f64>>,
    history: PairHistory,
    buffer: ReplayBuffer,
    /// `(s_{n-1}, a_{n-1})`.
    last: Option<(StateVector, f64)>,
    n: u64,
    rng: ChaCha8Rng,
}

impl ApiAgent {
    /// Zero critic, zero filter estimate; the first action is the grid's smallest value.
    pub fn new(cfg: ApiConfig, dim: usize, rho: f64, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut feature_rng = ChaCha8Rng::seed_from_u64(seed);
        feature_rng.set_stream(STREAM_FEATURES);
        let rff = RffParams::from_config(
            STATE_ACTION_DIM,
            &cfg.rff,
            rand::Rng::random::<u64>(&mut feature_rng),
        )?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(STREAM_REPLAY);
        Ok(Self {
            q: QWeights::zeros(rff.feature_dim()),
            filter: LmpState::zeros(dim, rho)?,
            theta_prev: None,
            history: PairHistory::new(cfg.m_av),
            buffer: ReplayBuffer::new(cfg.buffer_capacity),
            last: None,
            n: 0,
            rng,
            rff,
            cfg,
        })
    }

    pub fn config(&self) -> &ApiConfig {
        &self.cfg
    }

    pub fn rff(&self) -> &RffParams {
        &self.rff
    }

    pub fn q(&self) -> &QWeights {
        &self.q
    }

    pub fn theta(&self) -> &[f64] {
        &self.filter.theta
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn time(&self) -> u64 {
        self.n
    }

    /// Processes `(x_n, y_n)`: state, greedy action, LMP update, hyperslabs, KM step.
    pub fn step(&mut self, x: &[f64], y: f64) -> Result<StepReport> {
        check_len(self.filter.theta.len(), x.len())?;
        let n = self.n + 1;
        let params = StateParams {
            m_av: self.cfg.m_av,
            varpi: self.cfg.varpi,
            rho: self.filter.rho,
        };
        let s4_input = match (&self.theta_prev, &self.last) {
            (Some(prev), Some((s_prev, _))) => S4Input::Recursive {
                theta_prev: prev,
                prev_s4: s_prev.s4,
            },
            _ => S4Input::Initial {
                p0: self.cfg.grid.smallest(),
            },
        };
        let state = compute_state(&self.history, x, y, &self.filter.theta, s4_input, params)?;

        let action = greedy_action(&self.q, &state, &self.cfg.grid, &self.rff)?;

        let theta_now = self.filter.theta.clone();
        let prior_error = self.filter.update(x, y, action)?;

        let mut slabs = 0;
        if let Some((s_prev, a_prev)) = self.last {
            let reference = Transition {
                state: s_prev,
                action: a_prev,
                next_state: state,
                one_step_loss: one_step_loss(&self.history, &theta_now, self.cfg.m_av)?,
                time_index: n - 1,
            };
            let operator = self.operator(&reference, n)?;
            slabs = operator.slabs().len();
            self.q = km_update(&operator, &self.q, self.cfg.lambda)?;
            self.buffer.push(reference);
        }

        self.theta_prev = Some(theta_now);
        self.last = Some((state, action));
        self.history.push(x, y);
        self.n = n;
        Ok(StepReport {
            n,
            state,
            action,
            prior_error,
            slabs,
        })
    }

    fn operator(&mut self, reference: &Transition, n: u64) -> Result<BellmanConfig> {
        let cfg = &self.cfg;
        if cfg.variant == Variant::Obr {
            let slab = build_hyperslab(reference, &[], &self.q, &self.rff, cfg, SlabKind::Local)?
                .with_weight(1.0)?;
            return BellmanConfig::new(cfg.alpha, vec![slab], false);
        }

        let local = local_sampling(
            &self.buffer,
            reference,
            cfg.window,
            cfg.similarity,
            cfg.rff.bandwidth,
        )?;
        let local_slab =
            build_hyperslab(reference, &local[1..], &self.q, &self.rff, cfg, SlabKind::Local)?;

        let remote_slab: Option<Hyperslab> = if cfg.w2 > 0.0 {
            remote_past_sample(&self.buffer, n, cfg.remote_horizon, &mut self.rng).and_then(|t| {
                build_hyperslab(&t, &[], &self.q, &self.rff, cfg, SlabKind::Remote).ok()
            })
        } else {
            None
        };
        let slabs = match remote_slab {
            Some(remote) => vec![local_slab, remote],
            None => vec![local_slab.with_weight(1.0)?],
        };
        BellmanConfig::new(cfg.alpha, slabs, true)
    }
}

/// Free-function form of [`ApiAgent::step`].
pub fn api_step(agent: &mut ApiAgent, x: &[f64], y: f64) -> Result<StepReport> {
    agent.step(x, y)
}
