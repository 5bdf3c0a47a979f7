use serde::Serialize;

use crate::error::{Error, Result};

/// Per-round smoothing, sampler budget, sample count and failure budget for
/// a horizon `n` and total failure probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub n: usize,
    pub delta: f64,
    pub alpha: f64,
    pub eps: f64,
    pub s: usize,
    pub delta_t: f64,
    pub eta: f64,
}

impl Schedule {
    /// The Chernoff requirement `alpha * s >= 16 log(1 / delta_t)`.
    pub fn hypothesis_holds(&self) -> bool {
        self.alpha * self.s as f64 >= 16.0 * (1.0 / self.delta_t).ln()
    }

    pub fn total_failure(&self) -> f64 {
        self.delta_t * self.n as f64
    }
}

/// `alpha = 1/(2n)`, `eps = 1/(20 n^3)`, `delta_t = delta/n`,
/// `s = ceil(32 n^3 log(n/delta))`, `eta = 1`.
pub fn corollary_schedule(n: usize, delta: f64) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta = {delta} must lie in (0, 1)")));
    }
    let nf = n as f64;
    let n3 = nf * nf * nf;
    let s = (32.0 * n3 * (nf / delta).ln()).ceil();
    if s > usize::MAX as f64 {
        return Err(Error::invalid("sample count overflows"));
    }
    let sched = Schedule {
        n,
        delta,
        alpha: 1.0 / (2.0 * nf),
        eps: 1.0 / (20.0 * n3),
        s: s as usize,
        delta_t: delta / nf,
        eta: 1.0,
    };
    if !sched.hypothesis_holds() {
        return Err(Error::invalid("schedule violates alpha * s >= 16 log(1/delta_t)"));
    }
    Ok(sched)
}
