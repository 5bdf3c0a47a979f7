use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{OnlinePredictor, Prediction};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm, project_ball};
use crate::loss::loss_grad_scalar;
use crate::posterior::LabeledExample;

fn check_scales(b: f64, r: f64) -> Result<()> {
    if !(b > 0.0 && b.is_finite() && r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("need B > 0 and R > 0, got B = {b}, R = {r}")));
    }
    Ok(())
}

/// Gradient of the logistic loss at `theta` for one example.
fn loss_gradient(theta: &[f64], ex: &LabeledExample) -> Vec<f64> {
    let y = ex.y.sign();
    let g = loss_grad_scalar(ex.margin(theta)) * y;
    ex.x.iter().map(|x| g * x).collect()
}

/// Projected online gradient descent on the `B`-ball with step
/// `B / (R sqrt(t))`.
#[derive(Debug, Clone)]
pub struct Ogd {
    pub theta: Vec<f64>,
    b: f64,
    r: f64,
    t: usize,
    fixed_eta: Option<f64>,
}

impl Ogd {
    pub fn new(dim: usize, b: f64, r: f64) -> Result<Self> {
        check_scales(b, r)?;
        Ok(Self {
            theta: vec![0.0; dim],
            b,
            r,
            t: 0,
            fixed_eta: None,
        })
    }

    /// Uses a constant step instead of the decaying schedule.
    pub fn with_fixed_step(mut self, eta: f64) -> Self {
        self.fixed_eta = Some(eta);
        self
    }

    pub fn step_size(&self, t: usize) -> f64 {
        self.fixed_eta
            .unwrap_or_else(|| self.b / (self.r * (t as f64).sqrt()))
    }
}

impl OnlinePredictor for Ogd {
    fn name(&self) -> &'static str {
        "ogd"
    }

    fn predict(&mut self, _past: &[LabeledExample], x: &[f64]) -> Result<Prediction> {
        check_dim(self.theta.len(), x.len())?;
        Ok(Prediction::proper(dot(&self.theta, x)))
    }

    fn observe(&mut self, ex: &LabeledExample) -> Result<()> {
        check_dim(self.theta.len(), ex.dim())?;
        self.t += 1;
        let eta = self.step_size(self.t);
        let g = loss_gradient(&self.theta, ex);
        axpy(-eta, &g, &mut self.theta);
        project_ball(&mut self.theta, self.b);
        Ok(())
    }
}

/// Online Newton step on the `B`-ball with `A_0 = eps_a I` and
/// `gamma = min(1 / (4 R B), 1) / 2`. Keeps `A` and `A^{-1}` in sync by
/// Sherman-Morrison updates.
#[derive(Debug, Clone)]
pub struct Ons {
    pub theta: Vec<f64>,
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    gamma: f64,
    b: f64,
}

impl Ons {
    pub fn new(dim: usize, b: f64, r: f64) -> Result<Self> {
        check_scales(b, r)?;
        Self::with_constants(dim, b, 1.0, 0.5 * (1.0 / (4.0 * r * b)).min(1.0))
    }

    pub fn with_constants(dim: usize, b: f64, eps_a: f64, gamma: f64) -> Result<Self> {
        if !(eps_a > 0.0 && gamma > 0.0) {
            return Err(Error::invalid("ONS needs eps_a > 0 and gamma > 0"));
        }
        Ok(Self {
            theta: vec![0.0; dim],
            a: DMatrix::identity(dim, dim) * eps_a,
            a_inv: DMatrix::identity(dim, dim) / eps_a,
            gamma,
            b,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `argmin_{|z| <= radius} (z - y)^T A (z - y)` for symmetric positive
/// definite `A`: `z = (A + mu I)^{-1} A y` with `mu >= 0` found by bisection.
pub fn generalized_projection(a: &DMatrix<f64>, y: &[f64], radius: f64) -> Vec<f64> {
    if norm(y) <= radius {
        return y.to_vec();
    }
    let eig = SymmetricEigen::new(a.clone());
    let c = eig.eigenvectors.transpose() * DVector::from_column_slice(y);
    let lam = &eig.eigenvalues;
    let norm_at = |mu: f64| -> f64 {
        c.iter()
            .zip(lam.iter())
            .map(|(ci, li)| (li * ci / (li + mu)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut hi = lam.max().max(1e-12);
    while norm_at(hi) > radius {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let scaled = DVector::from_iterator(c.len(), c.iter().zip(lam.iter()).map(|(ci, li)| li * ci / (li + hi)));
    let z = &eig.eigenvectors * scaled;
    let mut z: Vec<f64> = z.iter().copied().collect();
    // Bisection lands inside up to rounding; clip the last ulps.
    project_ball(&mut z, radius);
    z
}

impl OnlinePredictor for Ons {
    fn name(&self) -> &'static str {
        "ons"
    }

    fn predict(&mut self, _past: &[LabeledExample], x: &[f64]) -> Result<Prediction> {
        check_dim(self.theta.len(), x.len())?;
        Ok(Prediction::proper(dot(&self.theta, x)))
    }

    fn observe(&mut self, ex: &LabeledExample) -> Result<()> {
        check_dim(self.theta.len(), ex.dim())?;
        let g = DVector::from_vec(loss_gradient(&self.theta, ex));
        self.a += &g * g.transpose();
        let ag = &self.a_inv * &g;
        let denom = 1.0 + g.dot(&ag);
        self.a_inv -= (&ag * ag.transpose()) / denom;
        let step = &self.a_inv * &g / self.gamma;
        let y: Vec<f64> = self.theta.iter().zip(step.iter()).map(|(t, s)| t - s).collect();
        self.theta = generalized_projection(&self.a, &y, self.b);
        Ok(())
    }
}
