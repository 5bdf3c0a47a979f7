use serde::Serialize;

use super::{run_mala, ChainState};
use crate::posterior::{Potential, PosteriorSpec};
use crate::error::{Error, Result};

/// Pilot-phase step-size adaptation: batches of `pilot` proposals, growing
/// `h` by `grow` when acceptance exceeds the window and shrinking by
/// `shrink` when it falls below, for at most `max_batches` batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptConfig {
    pub target_lo: f64,
    pub target_hi: f64,
    pub pilot: usize,
    pub max_batches: usize,
    pub grow: f64,
    pub shrink: f64,
}

impl AdaptConfig {
    /// Default schedule with the acceptance window centred on `point`.
    pub fn around(point: f64, half_width: f64) -> Result<Self> {
        let (lo, hi) = (point - half_width, point + half_width);
        if !(lo > 0.0 && hi < 1.0 && half_width > 0.0) {
            return Err(Error::invalid(format!(
                "acceptance window [{lo}, {hi}] must lie inside (0, 1)"
            )));
        }
        Ok(Self {
            target_lo: lo,
            target_hi: hi,
            ..Self::default()
        })
    }
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            target_lo: 0.55,
            target_hi: 0.80,
            pilot: 5,
            max_batches: 50,
            grow: 1.5,
            shrink: 0.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptReport {
    pub h_init: f64,
    pub h: f64,
    pub batches: usize,
    pub last_acceptance: f64,
    /// False when the window was never hit within `max_batches`.
    pub reached: bool,
    pub transitions: u64,
}

/// `h_t = (1e-3 + R^2 (t-1) / 4 + B^-2)^-1`.
pub fn initial_step_size(r: f64, b: f64, t: usize) -> f64 {
    1.0 / (1e-3 + 0.25 * r * r * (t.saturating_sub(1)) as f64 + 1.0 / (b * b))
}

/// Adapts `state.h` on an arbitrary target starting from `h_init`. The pilot
/// proposals are real transitions: the chain advances.
pub fn adapt_step_size_with<P: Potential + ?Sized>(
    target: &P,
    state: &mut ChainState,
    h_init: f64,
    cfg: &AdaptConfig,
) -> AdaptReport {
    assert!(
        0.0 < cfg.target_lo && cfg.target_lo < cfg.target_hi && cfg.target_hi < 1.0,
        "acceptance window must satisfy 0 < lo < hi < 1"
    );
    let pilot = cfg.pilot.max(1);
    state.h = h_init;
    let mut report = AdaptReport {
        h_init,
        h: h_init,
        batches: 0,
        last_acceptance: 0.0,
        reached: false,
        transitions: 0,
    };
    for _ in 0..cfg.max_batches {
        let acc = run_mala(target, state, pilot);
        report.batches += 1;
        report.transitions += pilot as u64;
        let rate = acc as f64 / pilot as f64;
        report.last_acceptance = rate;
        if rate > cfg.target_hi {
            state.h *= cfg.grow;
        } else if rate < cfg.target_lo {
            state.h *= cfg.shrink;
        } else {
            report.reached = true;
            break;
        }
    }
    report.h = state.h;
    report
}

/// Adapts on the posterior, starting from [`initial_step_size`] for its round.
pub fn adapt_step_size(spec: &PosteriorSpec<'_>, state: &mut ChainState, r: f64, cfg: &AdaptConfig) -> AdaptReport {
    let h0 = initial_step_size(r, spec.b(), spec.round());
    adapt_step_size_with(spec, state, h0, cfg)
}
