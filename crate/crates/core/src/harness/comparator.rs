use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::linalg::dot;
use crate::loss::{logistic_loss, loss_grad_scalar};
use crate::optim::{projected_gradient, PgOptions};
use crate::posterior::LabeledExample;
use crate::predictors::{OnlinePredictor, Ogd};

/// The best fixed predictor in the `B`-ball in hindsight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparatorSolution {
    pub b: f64,
    pub value: f64,
    pub theta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretReport {
    pub learner_loss: f64,
    pub comparator_loss: f64,
    pub regret: f64,
    pub comparator_theta: Vec<f64>,
    pub comparator_converged: bool,
}

impl RegretReport {
    pub fn new(learner_loss: f64, sol: &ComparatorSolution) -> Self {
        Self {
            learner_loss,
            comparator_loss: sol.value,
            regret: learner_loss - sol.value,
            comparator_theta: sol.theta.clone(),
            comparator_converged: sol.converged,
        }
    }
}

/// `sum_t l(y_t <theta, x_t>)` and its gradient.
pub fn empirical_loss(data: &[LabeledExample], theta: &[f64], grad: &mut [f64]) -> f64 {
    grad.fill(0.0);
    let mut total = 0.0;
    for e in data {
        let y = e.y.sign();
        let z = y * dot(&e.x, theta);
        total += logistic_loss(z);
        let c = loss_grad_scalar(z) * y;
        for (g, x) in grad.iter_mut().zip(&e.x) {
            *g += c * x;
        }
    }
    total
}

/// `inf_{|theta| <= B} sum_t l(y_t <theta, x_t>)` by projected gradient,
/// started from 0 and from the final OGD iterate; the better run is kept.
pub fn comparator_loss(data: &[LabeledExample], dim: usize, b: f64) -> Result<ComparatorSolution> {
    if data.is_empty() {
        return Ok(ComparatorSolution {
            b,
            value: 0.0,
            theta: vec![0.0; dim],
            converged: true,
            iterations: 0,
        });
    }
    let r = crate::posterior::radius_of(data).max(1e-12);
    let mut ogd = Ogd::new(dim, b, r)?;
    for e in data {
        ogd.observe(e)?;
    }
    let f = |th: &[f64], g: &mut [f64]| empirical_loss(data, th, g);
    let opts = PgOptions::default();
    let from_zero = projected_gradient(f, &vec![0.0; dim], b, opts);
    let from_ogd = projected_gradient(f, &ogd.theta, b, opts);
    let best = if from_ogd.value < from_zero.value { from_ogd } else { from_zero };
    Ok(ComparatorSolution {
        b,
        value: best.value,
        theta: best.x,
        converged: best.converged,
        iterations: best.iterations,
    })
}

const CACHE_VERSION: &[u8] = b"ewlr-comparator-v1";

/// Content hash of a dataset and prior scale.
pub fn cache_key(data: &[LabeledExample], dim: usize, b: f64) -> String {
    let mut h = Sha256::new();
    h.update(CACHE_VERSION);
    h.update((dim as u64).to_le_bytes());
    h.update(b.to_bits().to_le_bytes());
    for e in data {
        h.update([(e.y.sign() > 0.0) as u8]);
        for v in &e.x {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// [`comparator_loss`] memoized as JSON files under `dir`.
pub fn comparator_cached(data: &[LabeledExample], dim: usize, b: f64, dir: &Path) -> Result<ComparatorSolution> {
    let path = dir.join(format!("{}.json", cache_key(data, dim, b)));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(sol) = serde_json::from_str::<ComparatorSolution>(&text) {
            return Ok(sol);
        }
    }
    let sol = comparator_loss(data, dim, b)?;
    std::fs::create_dir_all(dir)?;
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let tmp = path.with_extension(format!(
        "{}.{}.tmp",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&tmp, serde_json::to_string(&sol)?)?;
    std::fs::rename(tmp, &path)?;
    Ok(sol)
}
