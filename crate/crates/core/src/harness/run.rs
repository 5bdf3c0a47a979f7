use serde::Serialize;

use super::comparator::{comparator_cached, comparator_loss, RegretReport};
use super::config::RunConfig;
use super::online::{run_online, RoundLog};
use super::stats::Summary;
use crate::error::{Error, Result};
use crate::par;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatResult {
    pub repeat: usize,
    pub seed: u64,
    pub logs: Vec<RoundLog>,
    pub regret: RegretReport,
    pub total_transitions: u64,
}

/// Median and interquartile band of the running average loss at round `t`
/// across repeats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub config: RunConfig,
    pub repeats: Vec<RepeatResult>,
    pub curve: Vec<CurvePoint>,
}

/// Runs every repeat (in parallel) and aggregates the loss curves.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let ds = cfg.load_data()?;
    let n = cfg.n.unwrap_or(ds.len());
    let repeats = par::map_range(cfg.repeats, |r| -> Result<RepeatResult> {
        let seed = derive_seed(cfg.seed, r as u64);
        let data = if cfg.permute { ds.permuted(seed) } else { ds.clone() }.truncated(n)?;
        let mut pred = cfg.build_predictor(data.dim(), data.radius(), n, seed)?;
        let logs = run_online(pred.as_mut(), data.examples())?;
        let sol = match &cfg.comparator_cache {
            Some(dir) => comparator_cached(data.examples(), data.dim(), cfg.b, dir)?,
            None => comparator_loss(data.examples(), data.dim(), cfg.b)?,
        };
        let learner = logs.last().map_or(0.0, |l| l.cum_loss);
        Ok(RepeatResult {
            repeat: r,
            seed,
            total_transitions: logs.iter().map(|l| l.transitions).sum(),
            logs,
            regret: RegretReport::new(learner, &sol),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let curve = (0..n)
        .map(|i| {
            let s = Summary::of(repeats.iter().map(|r| r.logs[i].avg_loss))?;
            Ok(CurvePoint {
                t: i + 1,
                median: s.median,
                q25: s.q25,
                q75: s.q75,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput {
        config: cfg.clone(),
        repeats,
        curve,
    })
}

/// Final average loss across repeats at one prior scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "B")]
    pub b: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub values: Vec<f64>,
}

/// Repeats the run for each `B` in `grid`.
pub fn sweep_b(cfg: &RunConfig, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::invalid("B grid is empty"));
    }
    grid.iter()
        .map(|&b| {
            let out = run_experiment(&RunConfig { b, ..cfg.clone() })?;
            let values: Vec<f64> = out
                .repeats
                .iter()
                .map(|r| r.logs.last().map_or(0.0, |l| l.avg_loss))
                .collect();
            let s = Summary::of(values.iter().copied())?;
            Ok(SweepRow {
                b,
                median: s.median,
                q25: s.q25,
                q75: s.q75,
                values,
            })
        })
        .collect()
}
