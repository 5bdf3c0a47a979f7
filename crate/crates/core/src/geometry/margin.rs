use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::sphere::uniform_sphere;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::par;
use crate::posterior::{radius_of, LabeledExample};
use crate::rng::{self, Purpose};

const CHUNK: usize = 8192;

/// Margin quantities of a dataset along a unit direction `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    pub dim: usize,
    pub n: usize,
    pub gamma: f64,
    pub r: f64,
    pub gamma_bar: f64,
    pub t0: f64,
    pub t1: f64,
    pub alpha_t1: f64,
    pub lambda0: f64,
    pub b_critic: f64,
    pub separable: bool,
}

impl MarginReport {
    /// `alpha(t) = gamma t - R sqrt(1 - t^2)`.
    pub fn alpha(&self, t: f64) -> f64 {
        self.gamma * t - self.r * (1.0 - t * t).max(0.0).sqrt()
    }
}

/// Computes the margin report for horizon `n`. In one dimension the
/// threshold is `k_one_dim * log(2n) / gamma`. A non-unit `u` is normalized.
pub fn margin_report(data: &[LabeledExample], u: &[f64], n: usize, k_one_dim: f64) -> Result<MarginReport> {
    let un = norm(u);
    if !(un > 0.0) {
        return Err(Error::invalid("direction u must be nonzero"));
    }
    let u: Vec<f64> = u.iter().map(|v| v / un).collect();
    if data.is_empty() {
        return Err(Error::invalid("margin report needs at least one example"));
    }
    let dim = u.len();
    for e in data {
        crate::error::check_dim(dim, e.dim())?;
    }
    let gamma = data
        .iter()
        .map(|e| e.y.sign() * dot(&e.x, &u))
        .fold(f64::INFINITY, f64::min);
    let r = radius_of(data);
    let gamma_bar = gamma / r;
    let t0 = 1.0 / (1.0 + gamma_bar * gamma_bar).sqrt();
    let t1 = 0.5 * (1.0 + t0);
    let alpha_t1 = gamma * t1 - r * (1.0 - t1 * t1).sqrt();
    let log2n = (2.0 * n as f64).ln();
    let lambda0 = log2n / alpha_t1;
    let b_critic = if dim >= 2 {
        2.0 * (2.0 + 2f64.sqrt()) * log2n / (gamma * ((dim - 1) as f64).sqrt())
    } else {
        k_one_dim * log2n / gamma
    };
    Ok(MarginReport {
        dim,
        n,
        gamma,
        r,
        gamma_bar,
        t0,
        t1,
        alpha_t1,
        lambda0,
        b_critic,
        separable: gamma > 0.0,
    })
}

/// `c_d = Gamma(d/2) / ((d-1) sqrt(pi) Gamma((d-1)/2))`.
pub fn cap_constant(d: usize) -> f64 {
    let d = d as f64;
    (ln_gamma(d / 2.0) - ln_gamma((d - 1.0) / 2.0)).exp() / ((d - 1.0) * PI.sqrt())
}

/// `c_d (1 - t^2)^((d-1)/2)`, a lower bound on the spherical cap mass.
pub fn cap_lower_bound(d: usize, t: f64) -> f64 {
    cap_constant(d) * (1.0 - t * t).powf((d as f64 - 1.0) / 2.0)
}

/// `c_d^chi = e^{-3/2} / (2^{d/2 - 1} Gamma(d/2))`.
pub fn chi_radial_constant(d: usize) -> f64 {
    let d = d as f64;
    (-1.5 - (d / 2.0 - 1.0) * LN_2 - ln_gamma(d / 2.0)).exp()
}

/// Diagnostic upper bound on the cumulative loss of exponential weights:
/// `(d-1) log(2 / gamma_bar) + Rad(B, lambda0) + 1 - log c_d`, where `Rad`
/// is `log 2` once `B >= lambda0 / sqrt(d-1)` and
/// `lambda0^2 / (2 B^2) - log c_d^chi` below that.
pub fn cumulative_loss_bound(report: &MarginReport, b: f64, d: usize) -> Result<f64> {
    if !report.separable {
        return Err(Error::invalid("loss bound requires separable data"));
    }
    if d < 2 {
        return Err(Error::invalid("loss bound requires d >= 2"));
    }
    if !(b > 0.0) {
        return Err(Error::invalid("prior scale must be positive"));
    }
    let angular = (d as f64 - 1.0) * (2.0 / report.gamma_bar).ln();
    let threshold = report.lambda0 / ((d - 1) as f64).sqrt();
    let rad = if b >= threshold {
        LN_2
    } else {
        0.5 * (report.lambda0 / b).powi(2) - chi_radial_constant(d).ln()
    };
    Ok(angular + rad + 1.0 - cap_constant(d).ln())
}

/// Monte Carlo estimate of `P(<U, e_1> >= t)` for `U` uniform on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapCheck {
    pub empirical: f64,
    pub lower_bound: f64,
    pub stderr: f64,
}

impl CapCheck {
    pub fn passes(&self) -> bool {
        self.empirical >= self.lower_bound - 3.0 * self.stderr
    }
}

pub fn cap_probability_check(d: usize, t: f64, mc: usize, seed: u64) -> Result<CapCheck> {
    if d < 2 || !(0.0..1.0).contains(&t) || mc == 0 {
        return Err(Error::invalid("cap check needs d >= 2, t in [0, 1), mc > 0"));
    }
    let hits = chunked_count(mc, seed, |rng| uniform_sphere(d, rng)[0] >= t);
    let p = hits as f64 / mc as f64;
    Ok(CapCheck {
        empirical: p,
        lower_bound: cap_lower_bound(d, t),
        stderr: (p * (1.0 - p) / mc as f64).sqrt(),
    })
}

/// Empirical `P(chi^2_d >= d - 1)`.
pub fn chi_square_tail_check(d: usize, draws: usize, seed: u64) -> Result<f64> {
    let dist = ChiSquared::new(d as f64).map_err(|e| Error::invalid(e.to_string()))?;
    let thr = d as f64 - 1.0;
    let hits = chunked_count(draws, seed, |rng| dist.sample(rng) >= thr);
    Ok(hits as f64 / draws as f64)
}

/// Samples `mc` directions in `Cap(u, t1)` and checks that each has margin
/// at least `gamma t1 - R sqrt(1 - t1^2)` on every example.
pub fn cone_cap_inclusion_check(data: &[LabeledExample], u: &[f64], t1: f64, mc: usize, seed: u64) -> Result<bool> {
    let un = norm(u);
    if !(un > 0.0) || !(0.0..=1.0).contains(&t1) {
        return Err(Error::invalid("need nonzero u and t1 in [0, 1]"));
    }
    let u: Vec<f64> = u.iter().map(|v| v / un).collect();
    let d = u.len();
    let gamma = data
        .iter()
        .map(|e| e.y.sign() * dot(&e.x, &u))
        .fold(f64::INFINITY, f64::min);
    let r = radius_of(data);
    let floor = gamma * t1 - r * (1.0 - t1 * t1).sqrt();
    let slack = 1e-12 * r.max(1.0);
    let violations = chunked_count(mc, seed, |rng| {
        let v = cap_direction(&u, t1, d, rng);
        let m = data
            .iter()
            .map(|e| e.y.sign() * dot(&e.x, &v))
            .fold(f64::INFINITY, f64::min);
        m < floor - slack
    });
    Ok(violations == 0)
}

// A unit vector with <v, u> = s for s uniform on [t1, 1] and a uniformly
// random orthogonal part.
fn cap_direction<R: Rng>(u: &[f64], t1: f64, d: usize, rng: &mut R) -> Vec<f64> {
    let s: f64 = t1 + (1.0 - t1) * rng.random::<f64>();
    if d == 1 {
        return u.to_vec();
    }
    let mut w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let c = dot(&w, u);
    for (wi, ui) in w.iter_mut().zip(u) {
        *wi -= c * ui;
    }
    let wn = norm(&w);
    let ortho = (1.0 - s * s).max(0.0).sqrt();
    u.iter().zip(&w).map(|(ui, wi)| s * ui + ortho * wi / wn).collect()
}

fn chunked_count<F>(total: usize, seed: u64, hit: F) -> usize
where
    F: Fn(&mut rng::StreamRng) -> bool + Sync + Send,
{
    let chunks = total.div_ceil(CHUNK);
    par::map_range(chunks, |c| {
        let mut rng = rng::stream(seed, Purpose::Check, c as u64);
        let len = CHUNK.min(total - c * CHUNK);
        (0..len).filter(|_| hit(&mut rng)).count()
    })
    .into_iter()
    .sum()
}
