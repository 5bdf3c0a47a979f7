use super::{ew_predict_mc, Mode, OnlinePredictor, Prediction, Schedule};
use crate::error::Result;
use crate::loss::check_alpha;
use crate::posterior::{LabeledExample, PosteriorSpec};
use crate::sampler::{initial_step_size, practical_round, ChainEnsemble, ChainState, PracticalConfig, RoundStats, TheoryConfig};

/// Exponential weights with `s_t` independent bridged chains per round and
/// the schedule's smoothing.
#[derive(Debug, Clone)]
pub struct McTheory {
    b: f64,
    dim: usize,
    r: f64,
    schedule: Schedule,
    cfg: TheoryConfig,
    seed: u64,
    ensemble: Option<ChainEnsemble>,
    last: Option<RoundStats>,
}

impl McTheory {
    pub fn new(b: f64, dim: usize, r: f64, schedule: Schedule, seed: u64) -> Result<Self> {
        Self::with_config(b, dim, r, schedule, TheoryConfig::new(schedule.s), seed)
    }

    pub fn with_config(b: f64, dim: usize, r: f64, schedule: Schedule, cfg: TheoryConfig, seed: u64) -> Result<Self> {
        PosteriorSpec::new(b, dim, &[])?;
        check_alpha(schedule.alpha)?;
        Ok(Self {
            b,
            dim,
            r,
            schedule,
            cfg,
            seed,
            ensemble: None,
            last: None,
        })
    }

    pub fn ensemble(&self) -> Option<&ChainEnsemble> {
        self.ensemble.as_ref()
    }
}

impl OnlinePredictor for McTheory {
    fn name(&self) -> &'static str {
        "ew-mc-theory"
    }

    fn predict(&mut self, past: &[LabeledExample], x: &[f64]) -> Result<Prediction> {
        let t = past.len() + 1;
        if self.ensemble.as_ref().is_none_or(|e| e.round() > t) {
            self.ensemble = Some(ChainEnsemble::from_prior(self.cfg.chains, self.b, self.dim, self.seed)?);
            self.last = None;
        }
        let ens = self.ensemble.as_mut().expect("initialized above");
        while ens.round() < t {
            let spec = PosteriorSpec::new(self.b, self.dim, &past[..ens.round()])?;
            self.last = Some(ens.advance(spec, self.r, self.schedule.eps, &self.cfg)?);
        }
        ew_predict_mc(ens.samples(), x, self.schedule.alpha, Mode::McTheory)
    }

    fn last_stats(&self) -> Option<RoundStats> {
        self.last
    }
}

/// Exponential weights from one warm-started adaptive chain, averaging its
/// retained samples.
#[derive(Debug, Clone)]
pub struct McPractical {
    b: f64,
    dim: usize,
    r: f64,
    alpha: f64,
    cfg: PracticalConfig,
    seed: u64,
    chain: Option<ChainState>,
    last: Option<RoundStats>,
}

impl McPractical {
    pub fn new(b: f64, dim: usize, r: f64, alpha: f64, cfg: PracticalConfig, seed: u64) -> Result<Self> {
        PosteriorSpec::new(b, dim, &[])?;
        check_alpha(alpha)?;
        Ok(Self {
            b,
            dim,
            r,
            alpha,
            cfg,
            seed,
            chain: None,
            last: None,
        })
    }
}

impl OnlinePredictor for McPractical {
    fn name(&self) -> &'static str {
        "ew-mc-practical"
    }

    fn predict(&mut self, past: &[LabeledExample], x: &[f64]) -> Result<Prediction> {
        let chain = match &mut self.chain {
            Some(c) => c,
            slot => slot.insert(ChainState::from_prior(
                self.b,
                self.dim,
                initial_step_size(self.r, self.b, 1),
                self.seed,
                0,
            )?),
        };
        let spec = PosteriorSpec::new(self.b, self.dim, past)?;
        let (samples, stats) = practical_round(chain, spec, self.r, &self.cfg)?;
        self.last = Some(stats);
        ew_predict_mc(samples.iter().map(Vec::as_slice), x, self.alpha, Mode::McPractical)
    }

    fn last_stats(&self) -> Option<RoundStats> {
        self.last
    }
}
