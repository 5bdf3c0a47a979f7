use std::f64::consts::PI;

use super::{Mode, OnlinePredictor, Prediction};
use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;
use crate::loss::{sigmoid, Prob};
use crate::posterior::{DensityOracle, LabeledExample, PosteriorSpec, Potential};

/// The exact mixture forecast `E_{theta ~ rho_t}[sigma(<theta, x>)]` by
/// adaptive quadrature (d <= 2).
pub fn ew_predict_exact(spec: PosteriorSpec<'_>, x: &[f64]) -> Result<Prediction> {
    if spec.temper() != 1.0 {
        return Err(Error::invalid("exact forecast needs an untempered posterior"));
    }
    check_dim(spec.dim(), x.len())?;
    let oracle = DensityOracle::new(spec)?;
    let p_plus = oracle.expect_along(|th| sigmoid(dot(th, x)), &[x])?.clamp(0.0, 1.0);
    let p_minus = if p_plus <= 0.5 {
        1.0 - p_plus
    } else {
        oracle.expect_along(|th| sigmoid(-dot(th, x)), &[x])?.clamp(0.0, 1.0)
    };
    Ok(Prediction {
        p_plus: Prob::saturating(p_plus),
        p_minus: Prob::saturating(p_minus),
        mode: Mode::Exact,
    })
}

/// Cumulative exact-mixture loss after each prefix length in `checkpoints`,
/// through `L_n = log Z_1 - log Z_{n+1}` with `Z_t = ∫ exp(-V_t)`.
pub fn exact_cumulative_losses(data: &[LabeledExample], b: f64, dim: usize, checkpoints: &[usize]) -> Result<Vec<f64>> {
    let log_z1 = 0.5 * dim as f64 * (2.0 * PI * b * b).ln();
    checkpoints
        .iter()
        .map(|&n| {
            if n > data.len() {
                return Err(Error::invalid(format!("checkpoint {n} beyond {} examples", data.len())));
            }
            let spec = PosteriorSpec::new(b, dim, &data[..n])?;
            Ok(log_z1 - DensityOracle::new(spec)?.log_normalizer())
        })
        .collect()
}

/// Exact exponential weights as an online predictor.
#[derive(Debug, Clone)]
pub struct ExactEw {
    b: f64,
    dim: usize,
}

impl ExactEw {
    pub fn new(b: f64, dim: usize) -> Result<Self> {
        if dim > 2 {
            return Err(Error::invalid(format!("exact mode supports d <= 2, got {dim}")));
        }
        PosteriorSpec::new(b, dim, &[])?;
        Ok(Self { b, dim })
    }
}

impl OnlinePredictor for ExactEw {
    fn name(&self) -> &'static str {
        "ew-exact"
    }

    fn predict(&mut self, past: &[LabeledExample], x: &[f64]) -> Result<Prediction> {
        ew_predict_exact(PosteriorSpec::new(self.b, self.dim, past)?, x)
    }
}
