use rand::Rng;
use rand_distr::StandardNormal;

use super::{Mode, OnlinePredictor, Prediction};
use crate::error::{check_dim, Result};
use crate::geometry::{hit_and_run, ConeSlice};
use crate::linalg::{dot, norm};
use crate::loss::{check_alpha, Prob};
use crate::posterior::LabeledExample;
use crate::rng::{self, Purpose};

const MIN_ACCEPTANCE: f64 = 1e-6;
const PROBE_DRAWS: usize = 1_000_000;
const HIT_AND_RUN_BURN_IN: usize = 1000;

fn vote(p: f64) -> Prediction {
    Prediction::new(Prob::saturating(p), Mode::SolidAngle)
}

/// Probability that a standard Gaussian conditioned on the open cone has
/// `<x, theta> > 0`. Rejection sampling for `d <= 3`, falling back to
/// hit-and-run when acceptance drops below 1e-6 or in higher dimension.
pub fn solid_angle_predict<R: Rng + ?Sized>(cone: &ConeSlice, x: &[f64], mc_samples: usize, rng: &mut R) -> Result<Prediction> {
    check_dim(cone.dim(), x.len())?;
    if norm(x) == 0.0 {
        return Ok(vote(0.5));
    }
    let mc = mc_samples.max(1);
    if cone.dim() <= 3 {
        let (mut draws, mut accepted, mut favorable) = (0usize, 0usize, 0usize);
        let mut z = vec![0.0; cone.dim()];
        while accepted < mc {
            if draws >= PROBE_DRAWS && (accepted as f64) < MIN_ACCEPTANCE * draws as f64 {
                break;
            }
            z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            draws += 1;
            if cone.contains(&z) {
                accepted += 1;
                favorable += (dot(&z, x) > 0.0) as usize;
            }
        }
        if accepted == mc {
            return Ok(vote(favorable as f64 / mc as f64));
        }
    }
    let samples = hit_and_run(cone, mc, HIT_AND_RUN_BURN_IN, rng)?;
    let favorable = samples.iter().filter(|s| dot(s, x) > 0.0).count();
    Ok(vote(favorable as f64 / mc as f64))
}

/// The infinite-prior-scale limit of exponential weights on separable data.
#[derive(Debug, Clone)]
pub struct SolidAngle {
    dim: usize,
    mc_samples: usize,
    alpha: f64,
    seed: u64,
}

impl SolidAngle {
    pub fn new(dim: usize, mc_samples: usize, alpha: f64, seed: u64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            dim,
            mc_samples,
            alpha,
            seed,
        })
    }
}

impl OnlinePredictor for SolidAngle {
    fn name(&self) -> &'static str {
        "solid-angle"
    }

    fn predict(&mut self, past: &[LabeledExample], x: &[f64]) -> Result<Prediction> {
        let cone = ConeSlice::version_cone(past, self.dim)?;
        let mut rng = rng::stream(self.seed, Purpose::MonteCarlo, past.len() as u64);
        let p = solid_angle_predict(&cone, x, self.mc_samples, &mut rng)?;
        p.smoothed(self.alpha)
    }
}
