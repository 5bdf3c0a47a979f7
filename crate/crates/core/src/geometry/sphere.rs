use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Exp, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{min_norm_point, ConeSlice};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// A uniform draw from the unit sphere in `R^d`.
pub fn uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Exact fraction of the open 2-D cone's directions with `<x, theta> > 0`.
/// Any rotation-invariant law on the cone (a truncated standard Gaussian in
/// particular) gives this probability.
pub fn angular_fraction_2d(cone: &ConeSlice, x: &[f64]) -> Result<f64> {
    if cone.dim() != 2 || x.len() != 2 {
        return Err(Error::invalid("angular fraction is defined for d = 2"));
    }
    if norm(x) == 0.0 {
        return Ok(0.5);
    }
    if cone.rows().is_empty() {
        return Ok(0.5);
    }
    let (_, sol) = min_norm_point(&cone.with_gamma(1.0)?)?;
    if !sol.feasible {
        return Err(Error::Infeasible("version cone is empty".into()));
    }
    let phi = sol.w[1].atan2(sol.w[0]);
    let (mut lo, mut hi) = (-PI, PI);
    for a in cone.rows() {
        let d = wrap(a[1].atan2(a[0]) - phi);
        lo = lo.max(d - FRAC_PI_2);
        hi = hi.min(d + FRAC_PI_2);
    }
    let dx = wrap(x[1].atan2(x[0]) - phi);
    let mut cuts = vec![lo, hi];
    for k in -3..=3 {
        let s = dx + FRAC_PI_2 + k as f64 * PI;
        if s > lo && s < hi {
            cuts.push(s);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let favorable: f64 = cuts
        .windows(2)
        .filter(|w| (phi + 0.5 * (w[0] + w[1]) - (phi + dx)).cos() > 0.0)
        .map(|w| w[1] - w[0])
        .sum();
    Ok(favorable / (hi - lo))
}

/// Standard normal truncated to `(lo, hi)`.
fn truncated_normal<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    if lo > 0.0 {
        return -truncated_normal(-hi, -lo, rng);
    }
    if hi < -5.0 {
        // Exponential-proposal rejection on the mirrored tail (-hi, -lo).
        let (a, b) = (-hi, -lo);
        let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
        let exp = Exp::new(lambda).expect("positive rate");
        loop {
            let z = a + rng.sample(exp);
            if z < b && rng.random::<f64>() < (-(z - lambda).powi(2) / 2.0).exp() {
                return -z;
            }
        }
    }
    let n = Normal::standard();
    let (pl, ph) = (n.cdf(lo), n.cdf(hi));
    let u = pl + rng.random::<f64>() * (ph - pl);
    n.inverse_cdf(u).clamp(lo, hi)
}

/// Hit-and-run chain for the standard Gaussian restricted to an open cone.
#[derive(Debug, Clone)]
pub struct HitAndRun<'c> {
    cone: &'c ConeSlice,
    pub theta: Vec<f64>,
}

impl<'c> HitAndRun<'c> {
    /// Starts from the unit-margin SVM point, which lies inside the cone.
    pub fn new(cone: &'c ConeSlice) -> Result<Self> {
        let theta = if cone.rows().is_empty() {
            vec![0.0; cone.dim()]
        } else {
            let (_, sol) = min_norm_point(&cone.with_gamma(1.0)?)?;
            if !sol.feasible {
                return Err(Error::Infeasible("version cone is empty".into()));
            }
            sol.w
        };
        Ok(Self { cone, theta })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let u = uniform_sphere(self.cone.dim(), rng);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for a in self.cone.rows() {
            let c = dot(a, &self.theta);
            let r = dot(a, &u);
            if r > 0.0 {
                lo = lo.max(-c / r);
            } else if r < 0.0 {
                hi = hi.min(-c / r);
            }
        }
        let shift = dot(&self.theta, &u);
        let s = truncated_normal(lo + shift, hi + shift, rng) - shift;
        for (t, ui) in self.theta.iter_mut().zip(&u) {
            *t += s * ui;
        }
    }
}

/// `samples` hit-and-run states after `burn_in` steps, one step apart.
pub fn hit_and_run<R: Rng + ?Sized>(cone: &ConeSlice, samples: usize, burn_in: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    let mut chain = HitAndRun::new(cone)?;
    for _ in 0..burn_in {
        chain.step(rng);
    }
    Ok((0..samples)
        .map(|_| {
            chain.step(rng);
            chain.theta.clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn truncated_normal_stays_in_range() {
        let mut rng = stream(1, Purpose::Check, 0);
        for &(lo, hi) in &[(-1.0, 2.0), (3.0, 3.5), (-9.0, -8.0), (-40.0, -39.9), (-f64::INFINITY, 0.0)] {
            for _ in 0..200 {
                let z = truncated_normal(lo, hi, &mut rng);
                assert!(z >= lo && z <= hi, "{z} outside ({lo}, {hi})");
            }
        }
    }

    #[test]
    fn truncated_normal_half_line_mean() {
        let mut rng = stream(2, Purpose::Check, 0);
        let n = 100_000;
        let m: f64 = (0..n).map(|_| truncated_normal(0.0, f64::INFINITY, &mut rng)).sum::<f64>() / n as f64;
        assert!((m - (2.0 / PI).sqrt()).abs() < 0.01, "{m}");
    }
}
