use serde::Serialize;

use super::{run_mala, ChainState};
use crate::error::{Error, Result};
use crate::posterior::PosteriorSpec;

/// Rung count and per-rung budgets for one round's bridge `v_j = j * delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderSchedule {
    pub delta: f64,
    pub rungs: usize,
    pub rung_budget: f64,
    pub steps_per_rung: usize,
}

impl LadderSchedule {
    /// MALA transitions per chain for one round, `K * N_rung`.
    pub fn transitions(&self) -> u64 {
        (self.rungs * self.steps_per_rung) as u64
    }

    /// The temper of rung `j` (1-based); the last rung is exactly 1.
    pub fn rung(&self, j: usize) -> f64 {
        if j >= self.rungs {
            1.0
        } else {
            (j as f64 * self.delta).min(1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepCount {
    Fixed(usize),
    /// `ceil(c * sqrt(d) * kappa * log(K / eps))`.
    Accuracy { kappa: f64, dim: usize, c: f64 },
}

/// `delta = c_delta / (R B)` capped at 1, `K = ceil(1 / delta)`, and the
/// fresh budget split uniformly over the rungs.
pub fn build_ladder(r: f64, b: f64, eps_fresh: f64, c_delta: f64, steps: StepCount) -> Result<LadderSchedule> {
    if !(c_delta > 0.0 && c_delta < 1.0) {
        return Err(Error::invalid(format!("c_delta = {c_delta} must lie in (0, 1)")));
    }
    if !(eps_fresh > 0.0) {
        return Err(Error::invalid(format!("fresh budget {eps_fresh} must be positive")));
    }
    if !(r >= 0.0 && b > 0.0) {
        return Err(Error::invalid("radius and prior scale must be positive"));
    }
    let delta = if r * b <= c_delta { 1.0 } else { c_delta / (r * b) };
    let rungs = ceil_guarded(1.0 / delta).max(1);
    let steps_per_rung = match steps {
        StepCount::Fixed(n) => n,
        StepCount::Accuracy { kappa, dim, c } => step_count_for_accuracy(kappa, dim, eps_fresh, rungs, c),
    };
    Ok(LadderSchedule {
        delta,
        rungs,
        rung_budget: eps_fresh / rungs as f64,
        steps_per_rung,
    })
}

/// `ceil(c * sqrt(d) * kappa * max(1, log(K / eps)))`, at least one step.
pub fn step_count_for_accuracy(kappa: f64, d: usize, eps: f64, k: usize, c: f64) -> usize {
    let log_term = (k as f64 / eps).ln().max(1.0);
    ceil_guarded(c * (d as f64).sqrt() * kappa * log_term).max(1)
}

// Ceiling that ignores a few ulps of rounding above an integer.
fn ceil_guarded(x: f64) -> usize {
    (x * (1.0 - 1e-12)).ceil() as usize
}

/// Advances one chain from (approximately) `rho_{t-1}` to `rho_t` through
/// the rungs `v_1 < ... < v_K = 1` on the newest prefix example. Returns the
/// number of MALA transitions performed.
pub fn bridge_round(state: &mut ChainState, spec_t: PosteriorSpec<'_>, ladder: &LadderSchedule) -> Result<u64> {
    if ladder.steps_per_rung == 0 {
        return Ok(0);
    }
    for j in 1..=ladder.rungs {
        let rung = spec_t.with_temper(ladder.rung(j))?;
        run_mala(&rung, state, ladder.steps_per_rung);
    }
    Ok(ladder.transitions())
}

/// Total-variation accounting for one round: `d_TV(rho_t, rho~_t) <= err_inherited + eps_fresh`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundBudget {
    pub eps_fresh: f64,
    pub err_inherited: f64,
}

impl RoundBudget {
    pub fn total(&self) -> f64 {
        self.err_inherited + self.eps_fresh
    }
}

/// Running record of per-round budgets and transition counts.
#[derive(Debug, Clone, Default, Serialize)]
pub struct BudgetLedger {
    pub rounds: Vec<RoundBudget>,
    pub transitions: Vec<u64>,
    cumulative: f64,
}

impl BudgetLedger {
    pub fn record(&mut self, eps_fresh: f64, transitions: u64) -> RoundBudget {
        let budget = RoundBudget {
            eps_fresh,
            err_inherited: self.cumulative,
        };
        self.cumulative += eps_fresh;
        self.rounds.push(budget);
        self.transitions.push(transitions);
        budget
    }

    /// `err_t = sum_{i <= t} eps_i`.
    pub fn cumulative_error(&self) -> f64 {
        self.cumulative
    }

    pub fn total_transitions(&self) -> u64 {
        self.transitions.iter().sum()
    }
}
