//! Projected gradient descent on a Euclidean ball with Armijo backtracking.
//!
//! Trial steps start from the Barzilai-Borwein estimate of the previous
//! iteration and are halved until the sufficient-decrease condition
//! `f(x+) <= f(x) + <g, x+ - x> + |x+ - x|^2 / (2 s)` holds.

use serde::Serialize;

use crate::linalg::{dot, norm, project_ball};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgOptions {
    /// Stop once the gradient map `|x - x+| / s` falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PgResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub grad_map_norm: f64,
    pub converged: bool,
}

/// Minimizes a smooth convex `f` over `{|x| <= radius}` from `x0`. `f`
/// returns the value and writes the gradient.
pub fn projected_gradient<F>(f: F, x0: &[f64], radius: f64, opts: PgOptions) -> PgResult
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    let d = x0.len();
    let mut x = x0.to_vec();
    project_ball(&mut x, radius);
    let mut g = vec![0.0; d];
    let mut fx = f(&x, &mut g);
    let mut step = 1.0 / norm(&g).max(1.0);
    let mut g_new = vec![0.0; d];
    let mut gm = f64::INFINITY;
    for it in 0..opts.max_iter {
        let mut s = step;
        let (x_new, f_new) = loop {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - s * gi).collect();
            project_ball(&mut cand, radius);
            let diff: Vec<f64> = cand.iter().zip(&x).map(|(a, b)| a - b).collect();
            let fc = f(&cand, &mut g_new);
            if fc <= fx + dot(&g, &diff) + dot(&diff, &diff) / (2.0 * s) + 1e-15 * fx.abs() || s < 1e-300 {
                break (cand, fc);
            }
            s *= 0.5;
        };
        let dx: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        gm = norm(&dx) / s;
        if gm <= opts.tol {
            // The map at the accepted point is what certifies stationarity.
            return PgResult {
                value: f_new.min(fx),
                x: if f_new <= fx { x_new } else { x },
                iterations: it + 1,
                grad_map_norm: gm,
                converged: true,
            };
        }
        let dg: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&dx, &dg);
        step = if sy > 0.0 { dot(&dx, &dx) / sy } else { 2.0 * s };
        x = x_new;
        fx = f_new;
        std::mem::swap(&mut g, &mut g_new);
    }
    PgResult {
        x,
        value: fx,
        iterations: opts.max_iter,
        grad_map_norm: gm,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_inside_ball() {
        let f = |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * (x[0] - 0.3);
            g[1] = 20.0 * (x[1] + 0.2);
            (x[0] - 0.3).powi(2) + 10.0 * (x[1] + 0.2).powi(2)
        };
        let r = projected_gradient(f, &[0.0, 0.0], 5.0, PgOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 0.3).abs() < 1e-8 && (r.x[1] + 0.2).abs() < 1e-8);
    }

    #[test]
    fn linear_objective_hits_boundary() {
        let f = |x: &[f64], g: &mut [f64]| {
            g[0] = -3.0;
            g[1] = -4.0;
            -3.0 * x[0] - 4.0 * x[1]
        };
        let r = projected_gradient(f, &[0.0, 0.0], 2.0, PgOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.2).abs() < 1e-9 && (r.x[1] - 1.6).abs() < 1e-9);
        assert!((r.value + 10.0).abs() < 1e-9);
    }
}
