use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posterior::LabeledExample;
use crate::predictors::OnlinePredictor;

/// Metrics for one round of the online protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub t: usize,
    pub p_plus: f64,
    pub loss: f64,
    pub cum_loss: f64,
    pub avg_loss: f64,
    pub acceptance: Option<f64>,
    pub h: Option<f64>,
    pub transitions: u64,
}

/// Runs the protocol over `data`: round `t` forecasts from rounds `< t`
/// only, then the label is revealed.
pub fn run_online(pred: &mut dyn OnlinePredictor, data: &[LabeledExample]) -> Result<Vec<RoundLog>> {
    let mut logs = Vec::with_capacity(data.len());
    let mut cum = 0.0;
    for (i, e) in data.iter().enumerate() {
        let t = i + 1;
        let p = pred.predict(&data[..i], &e.x).map_err(|err| err.at_round(t))?;
        let loss = p.loss(e.y);
        if !loss.is_finite() {
            return Err(Error::invalid(format!("non-finite loss {loss}")).at_round(t));
        }
        pred.observe(e).map_err(|err| err.at_round(t))?;
        cum += loss;
        let stats = pred.last_stats().filter(|s| s.round == t);
        logs.push(RoundLog {
            t,
            p_plus: p.p_plus.get(),
            loss,
            cum_loss: cum,
            avg_loss: cum / t as f64,
            acceptance: stats.map(|s| s.acceptance),
            h: stats.map(|s| s.h),
            transitions: stats.map_or(0, |s| s.total_transitions),
        });
    }
    Ok(logs)
}
