//! MALA on posterior potentials, the power-tempered bridge between rounds,
//! and the two orchestration modes used by the Monte Carlo predictors.
//!
//! * theory mode: `s_t` independent chains, each bridged from its own
//!   previous-round state through `K` rungs with `N_rung` steps per rung;
//! * practical mode: one warm-started adaptive chain retaining `S` dependent
//!   samples per round.

mod adapt;
mod ladder;
mod orchestrate;

pub use adapt::{adapt_step_size, adapt_step_size_with, initial_step_size, AdaptConfig, AdaptReport};
pub use ladder::{
    bridge_round, build_ladder, step_count_for_accuracy, BudgetLedger, LadderSchedule, RoundBudget,
    StepCount,
};
pub use orchestrate::{
    draw_iid_samples, practical_round, ChainEnsemble, PracticalConfig, RoundStats, StepSizeRule,
    TheoryConfig,
};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::posterior::Potential;
use crate::rng::{self, Purpose, StreamRng};

/// One MALA chain: current point, step size, acceptance counters and its
/// private random stream.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub theta: Vec<f64>,
    pub h: f64,
    pub accepted: u64,
    pub proposed: u64,
    rng: StreamRng,
}

impl ChainState {
    pub fn new(theta: Vec<f64>, h: f64, rng: StreamRng) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("step size {h} must be positive")));
        }
        Ok(Self {
            theta,
            h,
            accepted: 0,
            proposed: 0,
            rng,
        })
    }

    /// Chain `index` of a run seeded with `seed`.
    pub fn seeded(theta: Vec<f64>, h: f64, seed: u64, index: u64) -> Result<Self> {
        Self::new(theta, h, rng::stream(seed, Purpose::Chain, index))
    }

    /// A chain started from an exact draw of the prior `N(0, B^2 I)`, using
    /// its own stream for the draw.
    pub fn from_prior(b: f64, dim: usize, h: f64, seed: u64, index: u64) -> Result<Self> {
        let mut rng = rng::stream(seed, Purpose::Chain, index);
        let theta = (0..dim)
            .map(|_| b * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self::new(theta, h, rng)
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn reset_counts(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
    }

    /// Replaces the random stream, e.g. for a throwaway pilot copy.
    pub(crate) fn with_rng(mut self, rng: StreamRng) -> Self {
        self.rng = rng;
        self
    }
}

struct Cached {
    value: f64,
    grad: Vec<f64>,
}

impl Cached {
    fn at<P: Potential + ?Sized>(target: &P, theta: &[f64]) -> Self {
        let mut grad = vec![0.0; theta.len()];
        let value = target.value_and_grad(theta, &mut grad);
        Self { value, grad }
    }
}

/// Log of the Metropolis-Hastings ratio for a move `theta -> prop`.
fn log_accept_ratio(h: f64, theta: &[f64], cur: &Cached, prop: &[f64], new: &Cached) -> f64 {
    // log q(b | a) = -|b - a + h grad(a)|^2 / (4h)
    let fwd: f64 = prop
        .iter()
        .zip(theta)
        .zip(&cur.grad)
        .map(|((p, t), g)| (p - t + h * g).powi(2))
        .sum();
    let bwd: f64 = theta
        .iter()
        .zip(prop)
        .zip(&new.grad)
        .map(|((t, p), g)| (t - p + h * g).powi(2))
        .sum();
    -new.value + cur.value - bwd / (4.0 * h) + fwd / (4.0 * h)
}

fn step_cached<P: Potential + ?Sized>(target: &P, state: &mut ChainState, cur: &mut Cached) -> bool {
    let h = state.h;
    let scale = (2.0 * h).sqrt();
    let prop: Vec<f64> = state
        .theta
        .iter()
        .zip(&cur.grad)
        .map(|(t, g)| t - h * g + scale * state.rng.sample::<f64, _>(StandardNormal))
        .collect();
    let u: f64 = state.rng.random();
    let new = Cached::at(target, &prop);
    state.proposed += 1;
    let log_alpha = if new.value.is_finite() {
        log_accept_ratio(h, &state.theta, cur, &prop, &new)
    } else {
        f64::NEG_INFINITY
    };
    if u.ln() < log_alpha {
        state.theta = prop;
        *cur = new;
        state.accepted += 1;
        true
    } else {
        false
    }
}

/// One MALA transition targeting `exp(-V)`. Returns whether the proposal
/// was accepted. Consumes exactly `d` normals and one uniform per call.
pub fn mala_step<P: Potential + ?Sized>(target: &P, state: &mut ChainState) -> bool {
    let mut cur = Cached::at(target, &state.theta);
    step_cached(target, state, &mut cur)
}

/// `steps` MALA transitions, reusing the potential evaluation across steps.
/// Bit-identical to calling [`mala_step`] `steps` times. Returns the number
/// of accepted proposals.
pub fn run_mala<P: Potential + ?Sized>(target: &P, state: &mut ChainState, steps: usize) -> u64 {
    if steps == 0 {
        return 0;
    }
    let mut cur = Cached::at(target, &state.theta);
    (0..steps)
        .map(|_| step_cached(target, state, &mut cur) as u64)
        .sum()
}

/// The Metropolis acceptance probability of moving from `theta` to `prop`
/// with step `h`.
pub fn acceptance_probability<P: Potential + ?Sized>(target: &P, h: f64, theta: &[f64], prop: &[f64]) -> f64 {
    let cur = Cached::at(target, theta);
    let new = Cached::at(target, prop);
    log_accept_ratio(h, theta, &cur, prop, &new).exp().min(1.0)
}

#[cfg(test)]
mod tests;
