//! Online prediction strategies: exponential weights (exact by quadrature,
//! or by Monte Carlo over MALA samples), the solid-angle voter, and the
//! OGD/ONS baselines.
//!
//! Everything is computed for the label `+1`; the `-1` probability is the
//! complement, evaluated directly where that is more accurate.

mod baselines;
mod mc;
mod schedule;
mod solid_angle;

pub use baselines::{generalized_projection, Ogd, Ons};
pub use mc::{McPractical, McTheory};
pub use schedule::{corollary_schedule, Schedule};
pub use solid_angle::{solid_angle_predict, SolidAngle};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::loss::{sigmoid, smooth, Prob};
use crate::posterior::{Label, LabeledExample};
use crate::sampler::RoundStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    McTheory,
    McPractical,
    SolidAngle,
    Baseline,
}

/// A forecast of `P(y = +1)`, with the complementary probability kept
/// separately so that tiny tail values are not lost to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub p_plus: Prob,
    pub p_minus: Prob,
    pub mode: Mode,
}

impl Prediction {
    pub fn new(p_plus: Prob, mode: Mode) -> Self {
        Self {
            p_plus,
            p_minus: p_plus.complement(),
            mode,
        }
    }

    /// A proper forecast `sigma(z)` for the margin `z = <theta, x>`.
    pub fn proper(z: f64) -> Self {
        Self {
            p_plus: Prob::saturating(sigmoid(z)),
            p_minus: Prob::saturating(sigmoid(-z)),
            mode: Mode::Baseline,
        }
    }

    pub fn prob(&self, y: Label) -> f64 {
        match y {
            Label::Pos => self.p_plus.get(),
            Label::Neg => self.p_minus.get(),
        }
    }

    /// Logistic log-loss `-log p(y)`.
    pub fn loss(&self, y: Label) -> f64 {
        -self.prob(y).ln()
    }

    fn smoothed(self, alpha: f64) -> Result<Self> {
        Ok(Self {
            p_plus: smooth(self.p_plus, alpha)?,
            p_minus: smooth(self.p_minus, alpha)?,
            mode: self.mode,
        })
    }
}

/// A sequential forecaster. `predict` sees the revealed prefix and the new
/// feature vector; `observe` then reveals the label.
pub trait OnlinePredictor: Send {
    fn name(&self) -> &'static str;

    fn predict(&mut self, past: &[LabeledExample], x: &[f64]) -> Result<Prediction>;

    fn observe(&mut self, _example: &LabeledExample) -> Result<()> {
        Ok(())
    }

    /// Sampler diagnostics for the last prediction, if any.
    fn last_stats(&self) -> Option<RoundStats> {
        None
    }
}

/// Monte Carlo forecast: the sample mean of `sigma(<theta_i, x>)`, smoothed
/// toward 1/2 by `alpha`.
pub fn ew_predict_mc<'s, I>(samples: I, x: &[f64], alpha: f64, mode: Mode) -> Result<Prediction>
where
    I: IntoIterator<Item = &'s [f64]>,
{
    let (mut plus, mut minus, mut n) = (0.0, 0.0, 0usize);
    for th in samples {
        crate::error::check_dim(x.len(), th.len())?;
        let z = dot(th, x);
        plus += sigmoid(z);
        minus += sigmoid(-z);
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    Prediction {
        p_plus: Prob::saturating(plus / n as f64),
        p_minus: Prob::saturating(minus / n as f64),
        mode,
    }
    .smoothed(alpha)
}

#[cfg(feature = "exact")]
mod exact;
#[cfg(feature = "exact")]
pub use exact::{ew_predict_exact, exact_cumulative_losses, ExactEw};

#[cfg(test)]
mod tests;
