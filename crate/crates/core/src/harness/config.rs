use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data_io::{read_libsvm, Dataset, GeneratorSpec, ParseOptions};
use crate::error::{Error, Result};
use crate::predictors::{corollary_schedule, McPractical, McTheory, OnlinePredictor, Ogd, Ons, SolidAngle};
use crate::sampler::{PracticalConfig, StepSizeRule, TheoryConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorKind {
    EwExact,
    EwTheory,
    EwPractical,
    SolidAngle,
    Ogd,
    Ons,
}

impl PredictorKind {
    pub const ALL: [Self; 6] = [
        Self::EwExact,
        Self::EwTheory,
        Self::EwPractical,
        Self::SolidAngle,
        Self::Ogd,
        Self::Ons,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::EwExact => "ew-exact",
            Self::EwTheory => "ew-theory",
            Self::EwPractical => "ew-practical",
            Self::SolidAngle => "solid-angle",
            Self::Ogd => "ogd",
            Self::Ons => "ons",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown predictor `{s}`")))
    }
}

/// Everything a run needs. Deserializes from a config file with every
/// field optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// A LIBSVM path or `gen:<generator spec>`.
    pub data: String,
    pub predictor: PredictorKind,
    #[serde(rename = "B")]
    pub b: f64,
    /// Rounds per repeat; all examples when unset.
    pub n: Option<usize>,
    pub seed: u64,
    pub repeats: usize,
    pub out: PathBuf,
    /// Shuffle each repeat with its own permutation.
    pub permute: bool,
    /// Keep only the first examples of the file before permuting.
    pub keep_first: Option<usize>,
    pub normalize: bool,
    pub zero_is_negative: bool,
    /// Horizon used for schedules when it differs from `n`.
    pub horizon: Option<usize>,
    pub delta: f64,
    /// Smoothing for the voter and practical EW; defaults to `1/(2n)`.
    pub alpha: Option<f64>,
    /// Overrides the schedule's chain count in theory mode.
    pub chains: Option<usize>,
    pub c_delta: f64,
    pub c_steps: f64,
    /// Use `h = c / (L sqrt(d))` in theory mode instead of the shared pilot.
    pub theory_step: Option<f64>,
    pub practical: PracticalConfig,
    pub mc_samples: usize,
    pub comparator_cache: Option<PathBuf>,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: String::new(),
            predictor: PredictorKind::EwPractical,
            b: 1.0,
            n: None,
            seed: 0,
            repeats: 1,
            out: PathBuf::from("out"),
            permute: true,
            keep_first: None,
            normalize: false,
            zero_is_negative: true,
            horizon: None,
            delta: 0.1,
            alpha: None,
            chains: None,
            c_delta: 0.5,
            c_steps: 1.0,
            theory_step: None,
            practical: PracticalConfig::default(),
            mc_samples: 100_000,
            comparator_cache: None,
            svg: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::invalid(format!("B = {} must be positive", self.b)));
        }
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        if self.data.is_empty() {
            return Err(Error::invalid("no data source given"));
        }
        Ok(())
    }

    /// Loads the configured dataset (before permutation).
    pub fn load_data(&self) -> Result<Dataset> {
        let ds = if let Some(spec) = self.data.strip_prefix("gen:") {
            GeneratorSpec::parse(spec)?.generate()?
        } else {
            let opts = ParseOptions {
                zero_is_negative: self.zero_is_negative,
                dim: None,
                normalize: false,
                max_examples: self.keep_first,
            };
            read_libsvm(std::path::Path::new(&self.data), &opts)?
        };
        let ds = if self.normalize { ds.normalized() } else { ds };
        if let Some(n) = self.n {
            if n > ds.len() {
                return Err(Error::invalid(format!("n = {n} exceeds the {} available examples", ds.len())));
            }
        }
        Ok(ds)
    }

    /// Builds the predictor for a dataset of dimension `dim` and radius `r`.
    pub fn build_predictor(&self, dim: usize, r: f64, n: usize, seed: u64) -> Result<Box<dyn OnlinePredictor>> {
        let r = if r > 0.0 { r } else { 1.0 };
        let horizon = self.horizon.unwrap_or(n).max(1);
        Ok(match self.predictor {
            PredictorKind::EwExact => exact_predictor(self.b, dim)?,
            PredictorKind::EwTheory => {
                let schedule = corollary_schedule(horizon, self.delta)?;
                let mut cfg = TheoryConfig::new(self.chains.unwrap_or(schedule.s));
                cfg.c_delta = self.c_delta;
                cfg.c_steps = self.c_steps;
                if let Some(c) = self.theory_step {
                    cfg.step_size = StepSizeRule::Theory { c };
                }
                Box::new(McTheory::with_config(self.b, dim, r, schedule, cfg, seed)?)
            }
            PredictorKind::EwPractical => Box::new(McPractical::new(
                self.b,
                dim,
                r,
                self.alpha.unwrap_or(1.0 / (2.0 * horizon as f64)),
                self.practical,
                seed,
            )?),
            PredictorKind::SolidAngle => Box::new(SolidAngle::new(
                dim,
                self.mc_samples,
                self.alpha.unwrap_or(1.0 / (2.0 * horizon as f64)),
                seed,
            )?),
            PredictorKind::Ogd => Box::new(Ogd::new(dim, self.b, r)?),
            PredictorKind::Ons => Box::new(Ons::new(dim, self.b, r)?),
        })
    }
}

#[cfg(feature = "exact")]
fn exact_predictor(b: f64, dim: usize) -> Result<Box<dyn OnlinePredictor>> {
    Ok(Box::new(crate::predictors::ExactEw::new(b, dim)?))
}

#[cfg(not(feature = "exact"))]
fn exact_predictor(_b: f64, _dim: usize) -> Result<Box<dyn OnlinePredictor>> {
    Err(Error::FeatureDisabled("exact"))
}
