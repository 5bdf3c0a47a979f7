//! Quadrature access to the exact posterior density in one or two dimensions.
//!
//! The integration box is centered at the posterior mode and grown until the
//! log-density on every face sits at least `LEVEL` nats below the peak. Since
//! the density is log-concave, the superlevel set above that threshold is a
//! convex set containing the mode, so it lies entirely inside the box.
//!
//! When the prior is wide compared with the data scale the density has
//! features of width about `1/R` spread over a region of width about `B`,
//! which a box rule can step over. In one dimension the panels are then
//! seeded geometrically around the origin; in two dimensions the integral
//! switches to polar coordinates with angular panels seeded around every
//! direction orthogonal to a data point.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use super::{radius_of, Potential, PosteriorSpec};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::loss::{logistic_loss, loss_grad_scalar, sigmoid_prime};
use crate::quadrature::{integrate_box, integrate_box_fixed, integrate_pieces, Bounds, Tolerance};

const LEVEL: f64 = 40.0;
/// `B R` above which two-dimensional integrals use polar coordinates.
const POLAR_SCALE: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct DensityOracle<'a> {
    spec: PosteriorSpec<'a>,
    mode: Vec<f64>,
    v0: f64,
    bounds: Bounds,
    mass: f64,
    tol: Tolerance,
    polar: bool,
}

impl<'a> DensityOracle<'a> {
    pub fn new(spec: PosteriorSpec<'a>) -> Result<Self> {
        Self::with_tolerance(spec, Tolerance::default())
    }

    pub fn with_tolerance(spec: PosteriorSpec<'a>, tol: Tolerance) -> Result<Self> {
        let d = spec.dim();
        if d > 2 {
            return Err(Error::invalid(format!(
                "quadrature oracle supports d <= 2, got d = {d}"
            )));
        }
        let (mode, hess) = newton_mode(&spec);
        let v0 = spec.value(&mode);
        let bounds = find_bounds(&spec, &mode, v0, &hess);
        let polar = d == 2 && spec.b() * radius_of(spec.prefix()) >= POLAR_SCALE;
        let mut oracle = Self {
            spec,
            mode,
            v0,
            bounds,
            mass: 1.0,
            tol,
            polar,
        };
        oracle.mass = if polar {
            oracle.polar_integral(|_| 1.0, &[], tol)?
        } else if d == 1 {
            let (lo, hi) = (oracle.bounds.lo[0], oracle.bounds.hi[0]);
            integrate_pieces(|t| oracle.unnormalized(&[t]), &oracle.breaks_1d(lo, hi), tol)?.value
        } else {
            let rough = integrate_box_fixed(|t| oracle.unnormalized(t), &oracle.bounds, 8);
            integrate_box(|t| oracle.unnormalized(t), &oracle.bounds, rough, 1, tol)?.value
        };
        if !(oracle.mass > 0.0 && oracle.mass.is_finite()) {
            return Err(Error::Quadrature {
                tolerance: tol.rel,
                estimate: f64::NAN,
            });
        }
        Ok(oracle)
    }

    pub fn spec(&self) -> &PosteriorSpec<'a> {
        &self.spec
    }

    pub fn mode(&self) -> &[f64] {
        &self.mode
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// `exp(-(V(theta) - V(mode)))`, equal to 1 at the mode.
    #[inline]
    pub fn unnormalized(&self, theta: &[f64]) -> f64 {
        (self.v0 - self.spec.value(theta)).exp()
    }

    /// `log ∫ exp(-V)`.
    pub fn log_normalizer(&self) -> f64 {
        self.mass.ln() - self.v0
    }

    pub fn density(&self, theta: &[f64]) -> f64 {
        self.unnormalized(theta) / self.mass
    }

    /// Posterior expectation of `g`, accurate to `tol.rel` relative to `sup |g|`.
    pub fn expect<G: Fn(&[f64]) -> f64>(&self, g: G) -> Result<f64> {
        self.expect_along(g, &[])
    }

    /// [`Self::expect`] for a `g` that varies sharply across the lines
    /// orthogonal to each of `dirs`, such as `sigma(<theta, x>)`.
    pub fn expect_along<G: Fn(&[f64]) -> f64>(&self, g: G, dirs: &[&[f64]]) -> Result<f64> {
        let tol = Tolerance {
            abs: 1e-2 * self.tol.rel * self.mass,
            ..self.tol
        };
        let value = if self.polar {
            self.polar_integral(g, dirs, tol)?
        } else if self.bounds.dim() == 1 {
            let (lo, hi) = (self.bounds.lo[0], self.bounds.hi[0]);
            integrate_pieces(|t| g(&[t]) * self.unnormalized(&[t]), &self.breaks_1d(lo, hi), tol)?.value
        } else {
            integrate_box(|t| g(t) * self.unnormalized(t), &self.bounds, self.mass, 1, tol)?.value
        };
        Ok(value / self.mass)
    }

    /// Marginal CDF in one dimension.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.bounds.dim() != 1 {
            return Err(Error::invalid("cdf is only available in one dimension"));
        }
        let (lo, hi) = (self.bounds.lo[0], self.bounds.hi[0]);
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(1.0);
        }
        let tol = Tolerance {
            abs: 1e-2 * self.tol.rel * self.mass,
            ..self.tol
        };
        let mut breaks: Vec<f64> = self.breaks_1d(lo, hi).into_iter().filter(|&b| b < x).collect();
        breaks.push(x);
        let e = integrate_pieces(|t| self.unnormalized(&[t]), &breaks, tol)?;
        Ok((e.value / self.mass).clamp(0.0, 1.0))
    }

    /// Panel edges on `[lo, hi]`: the ends, the mode, and points spaced
    /// geometrically away from the origin starting at `0.1 / R`.
    fn breaks_1d(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = vec![lo, hi, self.mode[0].clamp(lo, hi)];
        let r = radius_of(self.spec.prefix());
        if r > 0.0 {
            let mut w = 0.1 / r;
            out.push(0.0);
            while w < hi - lo {
                out.extend([-w, w]);
                w *= 4.0;
            }
        }
        out.retain(|&b| (lo..=hi).contains(&b));
        out
    }

    /// `∫ g exp(v0 - V)` over the plane in polar coordinates.
    fn polar_integral<G: Fn(&[f64]) -> f64>(&self, g: G, dirs: &[&[f64]], tol: Tolerance) -> Result<f64> {
        let b = self.spec.b();
        let wrap = |a: f64| (a + PI).rem_euclid(2.0 * PI) - PI;
        let mut breaks = vec![-PI, PI];
        let normals = self.spec.prefix().iter().map(|e| e.x.as_slice()).chain(dirs.iter().copied());
        for x in normals {
            let nx = norm(x);
            if nx == 0.0 {
                continue;
            }
            let edge = x[1].atan2(x[0]) + FRAC_PI_2;
            for e in [edge, edge - PI] {
                breaks.push(wrap(e));
                let mut w = 0.1 / (b * nx);
                while w < 0.5 {
                    breaks.extend([wrap(e - w), wrap(e + w)]);
                    w *= 4.0;
                }
            }
        }
        let inner = Tolerance {
            rel: 1e-2 * tol.rel,
            abs: tol.abs / (2.0 * PI),
            max_intervals: tol.max_intervals,
        };
        let outer = Tolerance {
            max_intervals: tol.max_intervals + 4 * breaks.len(),
            ..tol
        };
        let failed = Cell::new(None);
        let est = integrate_pieces(
            |phi| match self.radial_integral(&[phi.cos(), phi.sin()], &g, inner) {
                Ok(v) => v,
                Err(err) => {
                    if failed.take().is_none() {
                        failed.set(Some(err));
                    }
                    f64::NAN
                }
            },
            &breaks,
            outer,
        );
        if let Some(err) = failed.take() {
            return Err(err);
        }
        Ok(est?.value)
    }

    /// `∫_0^∞ s g(s u) exp(v0 - V(s u)) ds` for a unit vector `u`. The
    /// radial profile `V(s u) - log s` is convex, so panels are placed around
    /// its minimizer in units of the local curvature.
    fn radial_integral<G: Fn(&[f64]) -> f64>(&self, u: &[f64], g: &G, tol: Tolerance) -> Result<f64> {
        let inv_b2 = 1.0 / (self.spec.b() * self.spec.b());
        let terms: Vec<(f64, f64)> = self
            .spec
            .prefix()
            .iter()
            .enumerate()
            .map(|(i, e)| (self.spec.weight(i), e.y.sign() * dot(&e.x, u)))
            .collect();
        let psi = |r: f64| {
            terms.iter().map(|&(w, a)| w * logistic_loss(r * a)).sum::<f64>() + 0.5 * r * r * inv_b2 - r.ln()
        };
        let dpsi = |r: f64| {
            terms.iter().map(|&(w, a)| w * a * loss_grad_scalar(r * a)).sum::<f64>() + r * inv_b2 - 1.0 / r
        };
        let d2psi = |r: f64| {
            terms.iter().map(|&(w, a)| w * a * a * sigmoid_prime(r * a)).sum::<f64>() + inv_b2 + 1.0 / (r * r)
        };
        let mut hi = 1.0;
        while dpsi(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut lo = hi;
        while dpsi(lo) > 0.0 {
            lo *= 0.5;
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..200 {
            let d = dpsi(r);
            if d > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let step = r - d / d2psi(r);
            r = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        let sd = d2psi(r).sqrt().recip();
        let peak = psi(r);
        let mut span = 4.0 * sd;
        while psi(r + span) - peak < LEVEL {
            span *= 2.0;
        }
        let top = r + span;
        let mut breaks: Vec<f64> = [0.0, r - 6.0 * sd, r - 2.0 * sd, r, r + 2.0 * sd, r + 6.0 * sd, top]
            .into_iter()
            .filter(|&p| (0.0..=top).contains(&p))
            .collect();
        breaks.push(0.0);
        let f = |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            let (c, n) = (s * u[0], s * u[1]);
            g(&[c, n]) * (self.v0 - psi(s)).exp()
        };
        Ok(integrate_pieces(f, &breaks, tol)?.value)
    }
}

/// Rényi-2 divergence `D_2(rho_{t,v} || rho_{t,v+dv})` by quadrature (d <= 2).
///
/// Uses `D_2 = log E_v[exp(-dv l)] + log E_v[exp(dv l)]` where `l` is the loss
/// of the newest prefix example and `E_v` is the expectation under rung `v`.
pub fn renyi2_between_rungs(spec: PosteriorSpec<'_>, v: f64, dv: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) || !(0.0..=1.0).contains(&(v + dv)) {
        return Err(Error::invalid(format!(
            "rungs v = {v}, v + dv = {} must lie in [0, 1]",
            v + dv
        )));
    }
    if dv == 0.0 || spec.prefix().is_empty() {
        return Ok(0.0);
    }
    let oracle = DensityOracle::new(spec.with_temper(v)?)?;
    let c = spec.newest_loss(oracle.mode());
    let up = oracle.expect(|t| (dv * (spec.newest_loss(t) - c)).exp())?;
    let down = oracle.expect(|t| (-dv * (spec.newest_loss(t) - c)).exp())?;
    Ok((up.ln() + down.ln()).max(0.0))
}

fn hessian(spec: &PosteriorSpec<'_>, theta: &[f64]) -> [[f64; 2]; 2] {
    let d = theta.len();
    let inv_b2 = 1.0 / (spec.b() * spec.b());
    let mut h = [[0.0; 2]; 2];
    for (i, row) in h.iter_mut().enumerate().take(d) {
        row[i] = inv_b2;
    }
    let n = spec.prefix().len();
    for (i, e) in spec.prefix().iter().enumerate() {
        let w = if i + 1 == n { spec.temper() } else { 1.0 };
        let s = w * sigmoid_prime(e.margin(theta));
        for (row, xa) in h.iter_mut().zip(&e.x) {
            for (hab, xb) in row.iter_mut().zip(&e.x) {
                *hab += s * xa * xb;
            }
        }
    }
    h
}

fn solve(h: &[[f64; 2]; 2], g: &[f64]) -> Vec<f64> {
    if g.len() == 1 {
        return vec![g[0] / h[0][0]];
    }
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    vec![
        (h[1][1] * g[0] - h[0][1] * g[1]) / det,
        (h[0][0] * g[1] - h[1][0] * g[0]) / det,
    ]
}

/// Damped Newton on the strongly convex potential; returns the mode and the
/// Hessian there.
fn newton_mode(spec: &PosteriorSpec<'_>) -> (Vec<f64>, [[f64; 2]; 2]) {
    let d = spec.dim();
    let mut theta = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut v = spec.value_and_grad(&theta, &mut grad);
    for _ in 0..200 {
        let h = hessian(spec, &theta);
        let step = solve(&h, &grad);
        let decrement: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        if decrement < 1e-24 {
            break;
        }
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            let vc = spec.value(&cand);
            if vc <= v - 0.25 * t * decrement || t < 1e-12 {
                theta = cand;
                break;
            }
            t *= 0.5;
        }
        v = spec.value_and_grad(&theta, &mut grad);
    }
    let h = hessian(spec, &theta);
    (theta, h)
}

/// Maximum of the concave function `-(V - v0)` on the segment where axis
/// `fixed` equals `at` and the other axis spans `[lo, hi]`.
fn face_max(spec: &PosteriorSpec<'_>, v0: f64, fixed: usize, at: f64, lo: f64, hi: f64) -> f64 {
    let eval = |s: f64| {
        let mut p = [0.0; 2];
        p[fixed] = at;
        p[1 - fixed] = s;
        v0 - spec.value(&p)
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
        }
    }
    fc.max(fd).max(eval(lo)).max(eval(hi))
}

fn find_bounds(spec: &PosteriorSpec<'_>, mode: &[f64], v0: f64, hess: &[[f64; 2]; 2]) -> Bounds {
    let d = mode.len();
    let b = spec.b();
    // V - v0 >= |theta - mode|^2 / (2 B^2) bounds the reach of the superlevel set.
    let cap = (2.0 * LEVEL).sqrt() * b * 1.01;
    let mut lower = vec![0.0; d];
    let mut upper = vec![0.0; d];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        let col = solve(hess, &e);
        let sd = col[i].max(0.0).sqrt();
        lower[i] = (8.0 * sd).min(cap);
        upper[i] = lower[i];
    }
    for _ in 0..200 {
        let mut grown = false;
        for i in 0..d {
            for side in [-1.0, 1.0] {
                let off = if side < 0.0 { lower[i] } else { upper[i] };
                if off >= cap {
                    continue;
                }
                let at = mode[i] + side * off;
                let top = if d == 1 {
                    v0 - spec.value(&[at])
                } else {
                    let j = 1 - i;
                    face_max(spec, v0, i, at, mode[j] - lower[j], mode[j] + upper[j])
                };
                if top > -LEVEL {
                    let grown_off = (off * 2.0).min(cap);
                    if side < 0.0 {
                        lower[i] = grown_off;
                    } else {
                        upper[i] = grown_off;
                    }
                    grown = true;
                }
            }
        }
        if !grown {
            break;
        }
    }
    Bounds {
        lo: (0..d).map(|i| mode[i] - lower[i]).collect(),
        hi: (0..d).map(|i| mode[i] + upper[i]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::{Label, LabeledExample};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn prior_normalizer_is_gaussian() {
        for (d, b) in [(1, 1.0), (1, 30.0), (2, 2.0), (2, 500.0)] {
            let spec = PosteriorSpec::new(b, d, &[]).unwrap();
            let o = DensityOracle::new(spec).unwrap();
            let exact = d as f64 * 0.5 * (2.0 * PI * b * b).ln();
            assert_relative_eq!(o.log_normalizer(), exact, max_relative = 1e-9);
        }
    }

    #[test]
    fn cdf_of_prior_is_normal_cdf() {
        use statrs::distribution::{ContinuousCDF, Normal};
        let spec = PosteriorSpec::new(2.0, 1, &[]).unwrap();
        let o = DensityOracle::new(spec).unwrap();
        let n = Normal::new(0.0, 2.0).unwrap();
        for x in [-5.0, -1.0, 0.0, 0.3, 4.0] {
            assert!((o.cdf(x).unwrap() - n.cdf(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn renyi_zero_step_and_bound() {
        let one = [LabeledExample::new(vec![1.0], Label::Pos)];
        let spec = PosteriorSpec::new(1.0, 1, &one).unwrap();
        assert_eq!(renyi2_between_rungs(spec, 0.3, 0.0).unwrap(), 0.0);
        let r = renyi2_between_rungs(spec, 0.0, 0.1).unwrap();
        assert!((0.0..=0.01).contains(&r), "{r}");
        assert!(renyi2_between_rungs(spec, 0.95, 0.1).is_err());
    }

    #[test]
    fn rejects_high_dimension() {
        let spec = PosteriorSpec::new(1.0, 3, &[]).unwrap();
        assert!(DensityOracle::new(spec).is_err());
    }
}
