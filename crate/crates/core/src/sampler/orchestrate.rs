use serde::Serialize;

use super::{
    adapt_step_size, bridge_round, build_ladder, initial_step_size, run_mala, AdaptConfig, AdaptReport,
    BudgetLedger, ChainState, LadderSchedule, StepCount,
};
use crate::error::{Error, Result};
use crate::par;
use crate::posterior::PosteriorSpec;
use crate::rng::{self, Purpose};

/// Per-round sampler diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundStats {
    pub round: usize,
    pub h: f64,
    pub acceptance: f64,
    /// MALA transitions per chain this round.
    pub transitions: u64,
    /// MALA transitions summed over the sampling chains.
    pub total_transitions: u64,
    /// Transitions spent on throwaway pilot copies.
    pub pilot_transitions: u64,
    pub adapt: Option<AdaptReport>,
    /// Set when the adaptation window was not reached.
    pub warning: bool,
}

/// How theory-mode chains pick their step size each round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub enum StepSizeRule {
    /// One shared pilot on a throwaway copy of the first chain.
    Adapted(AdaptConfig),
    /// `h = c / (L sqrt(d))`.
    Theory { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct TheoryConfig {
    pub chains: usize,
    pub c_delta: f64,
    pub c_steps: f64,
    pub step_size: StepSizeRule,
}

impl TheoryConfig {
    pub fn new(chains: usize) -> Self {
        Self {
            chains,
            c_delta: 0.5,
            c_steps: 1.0,
            step_size: StepSizeRule::Adapted(AdaptConfig::default()),
        }
    }
}

/// Bridges every chain in `states` to `spec_t` and returns their end points.
pub fn draw_iid_samples(
    states: &mut [ChainState],
    spec_t: PosteriorSpec<'_>,
    ladder: &LadderSchedule,
) -> Result<Vec<Vec<f64>>> {
    par::map_mut(states, |_, s| bridge_round(s, spec_t, ladder).map(|_| s.theta.clone()))
        .into_iter()
        .collect()
}

/// Theory-mode state: independent chains, each carried from round to round.
#[derive(Debug, Clone)]
pub struct ChainEnsemble {
    chains: Vec<ChainState>,
    ledger: BudgetLedger,
    seed: u64,
    round: usize,
}

impl ChainEnsemble {
    /// Exact draws from the prior `N(0, B^2 I)`, i.e. the round-1 posterior.
    pub fn from_prior(n_chains: usize, b: f64, dim: usize, seed: u64) -> Result<Self> {
        if n_chains == 0 {
            return Err(Error::invalid("at least one chain is required"));
        }
        let h0 = initial_step_size(0.0, b, 1);
        let chains = par::map_range(n_chains, |i| ChainState::from_prior(b, dim, h0, seed, i as u64))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            chains,
            ledger: BudgetLedger::default(),
            seed,
            round: 1,
        })
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.chains.iter().map(|c| c.theta.as_slice())
    }

    pub fn chains(&self) -> &[ChainState] {
        &self.chains
    }

    pub fn ledger(&self) -> &BudgetLedger {
        &self.ledger
    }

    /// The round whose posterior the chains currently target.
    pub fn round(&self) -> usize {
        self.round
    }

    /// Moves every chain from the current round's posterior to `spec_t`,
    /// which must be the next round.
    pub fn advance(&mut self, spec_t: PosteriorSpec<'_>, r: f64, eps_fresh: f64, cfg: &TheoryConfig) -> Result<RoundStats> {
        let t = spec_t.round();
        if t != self.round + 1 {
            return Err(Error::invalid(format!(
                "ensemble is at round {}, cannot advance to round {t}",
                self.round
            )));
        }
        let consts = spec_t.constants(r);
        let dim = self.chains[0].dim();
        let ladder = build_ladder(
            r,
            spec_t.b(),
            eps_fresh,
            cfg.c_delta,
            StepCount::Accuracy {
                kappa: consts.kappa,
                dim,
                c: cfg.c_steps,
            },
        )?;
        let (h, adapt) = match cfg.step_size {
            StepSizeRule::Theory { c } => (c / (consts.l * (dim as f64).sqrt()), None),
            StepSizeRule::Adapted(acfg) => {
                let mut pilot = self.chains[0]
                    .clone()
                    .with_rng(rng::stream(self.seed, Purpose::Pilot, t as u64));
                let report = adapt_step_size(&spec_t, &mut pilot, r, &acfg);
                (report.h, Some(report))
            }
        };
        for c in &mut self.chains {
            c.h = h;
            c.reset_counts();
        }
        draw_iid_samples(&mut self.chains, spec_t, &ladder)?;
        let accepted: u64 = self.chains.iter().map(|c| c.accepted).sum();
        let proposed: u64 = self.chains.iter().map(|c| c.proposed).sum();
        let q = ladder.transitions();
        self.ledger.record(eps_fresh, q);
        self.round = t;
        Ok(RoundStats {
            round: t,
            h,
            acceptance: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
            transitions: q,
            total_transitions: q * self.chains.len() as u64,
            pilot_transitions: adapt.map_or(0, |a| a.transitions),
            adapt,
            warning: adapt.is_some_and(|a| !a.reached),
        })
    }
}

/// Practical-mode settings: optional short bridge, pilot adaptation,
/// burn-in, then `retain` samples every `thin` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PracticalConfig {
    pub adapt: AdaptConfig,
    pub burn_in: usize,
    pub retain: usize,
    pub thin: usize,
    /// Steps per rung of a bridge before adaptation; `None` skips it.
    pub bridge_steps_per_rung: Option<usize>,
    pub c_delta: f64,
}

impl Default for PracticalConfig {
    fn default() -> Self {
        Self {
            adapt: AdaptConfig::default(),
            burn_in: 10,
            retain: 24,
            thin: 1,
            bridge_steps_per_rung: Some(2),
            c_delta: 0.5,
        }
    }
}

/// One practical round on a warm-started chain. Returns the retained
/// (dependent) samples.
pub fn practical_round(
    state: &mut ChainState,
    spec_t: PosteriorSpec<'_>,
    r: f64,
    cfg: &PracticalConfig,
) -> Result<(Vec<Vec<f64>>, RoundStats)> {
    if cfg.retain == 0 || cfg.thin == 0 {
        return Err(Error::invalid("retain and thin must be positive"));
    }
    let t = spec_t.round();
    let mut transitions = 0;
    if let (Some(steps), true) = (cfg.bridge_steps_per_rung, t > 1) {
        state.h = initial_step_size(r, spec_t.b(), t);
        let ladder = build_ladder(r, spec_t.b(), 1.0, cfg.c_delta, StepCount::Fixed(steps))?;
        transitions += bridge_round(state, spec_t, &ladder)?;
    }
    let report = adapt_step_size(&spec_t, state, r, &cfg.adapt);
    transitions += report.transitions;
    state.reset_counts();
    run_mala(&spec_t, state, cfg.burn_in);
    let mut samples = Vec::with_capacity(cfg.retain);
    for _ in 0..cfg.retain {
        run_mala(&spec_t, state, cfg.thin);
        samples.push(state.theta.clone());
    }
    transitions += (cfg.burn_in + cfg.retain * cfg.thin) as u64;
    Ok((
        samples,
        RoundStats {
            round: t,
            h: state.h,
            acceptance: state.acceptance_rate(),
            transitions,
            total_transitions: transitions,
            pilot_transitions: 0,
            adapt: Some(report),
            warning: !report.reached,
        },
    ))
}
