//! Separable-data geometry: version cones, margin slices, the hard-margin
//! SVM direction, margin thresholds, and the cumulative-loss bound.

mod margin;
mod nnls;
mod sphere;

pub use margin::{
    cap_constant, cap_lower_bound, cap_probability_check, chi_radial_constant, chi_square_tail_check, cone_cap_inclusion_check,
    cumulative_loss_bound, margin_report, CapCheck, MarginReport,
};
pub use nnls::{ldp, nnls};
pub use sphere::{angular_fraction_2d, hit_and_run, uniform_sphere, HitAndRun};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm};
use crate::posterior::{Label, LabeledExample};

/// `{theta : <a_i, theta> >= gamma}` for `gamma > 0`, or the open cone
/// `{theta : <a_i, theta> > 0}` for `gamma = 0`, with rows `a_i = y_i x_i`.
/// All-zero rows are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSlice {
    rows: Vec<Vec<f64>>,
    gamma: f64,
    dim: usize,
}

impl ConeSlice {
    pub fn new(rows: Vec<Vec<f64>>, gamma: f64, dim: usize) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("slice level {gamma} must be >= 0")));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        for r in &rows {
            check_dim(dim, r.len())?;
        }
        // A zero row constrains nothing in the posterior: its likelihood is constant.
        let rows = rows.into_iter().filter(|r| r.iter().any(|&v| v != 0.0)).collect();
        Ok(Self { rows, gamma, dim })
    }

    pub fn from_examples(examples: &[LabeledExample], gamma: f64, dim: usize) -> Result<Self> {
        Self::new(examples.iter().map(LabeledExample::signed).collect(), gamma, dim)
    }

    /// The open version cone of `examples`.
    pub fn version_cone(examples: &[LabeledExample], dim: usize) -> Result<Self> {
        Self::from_examples(examples, 0.0, dim)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.rows.clone(), gamma, self.dim)
    }

    /// `min_i <a_i, theta>`, or `+inf` without constraints.
    pub fn min_margin(&self, theta: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|a| dot(a, theta))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        let m = self.min_margin(theta);
        if self.gamma == 0.0 {
            m > 0.0
        } else {
            m >= self.gamma
        }
    }

    fn constraint_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), self.dim, |i, j| self.rows[i][j])
    }
}

/// Minimum-norm point `w` of the unit slice, i.e. the hard-margin SVM.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvmSolution {
    pub w: Vec<f64>,
    pub margin_norm: f64,
    pub feasible: bool,
}

/// Minimum-norm point of a slice with `gamma > 0`, returned as the pair
/// `(theta, w)` with `w = theta / gamma`.
pub fn min_norm_point(cone: &ConeSlice) -> Result<(Vec<f64>, SvmSolution)> {
    if !(cone.gamma > 0.0) {
        return Err(Error::invalid("min-norm point needs a slice level gamma > 0"));
    }
    if cone.rows.is_empty() {
        let zero = vec![0.0; cone.dim];
        return Ok((
            zero.clone(),
            SvmSolution {
                w: zero,
                margin_norm: 0.0,
                feasible: true,
            },
        ));
    }
    let g = cone.constraint_matrix();
    let h = DVector::from_element(cone.rows.len(), cone.gamma);
    match ldp(&g, &h)? {
        Some(theta) => {
            let theta: Vec<f64> = theta.iter().copied().collect();
            let w: Vec<f64> = theta.iter().map(|t| t / cone.gamma).collect();
            let margin_norm = norm(&w);
            let feasible = cone.min_margin(&w) >= 1.0 - 1e-8;
            Ok((
                theta,
                SvmSolution {
                    w,
                    margin_norm,
                    feasible,
                },
            ))
        }
        None => Ok((
            vec![f64::NAN; cone.dim],
            SvmSolution {
                w: vec![f64::NAN; cone.dim],
                margin_norm: f64::INFINITY,
                feasible: false,
            },
        )),
    }
}

/// The hard-margin SVM solution of a set of labeled examples.
pub fn hard_margin_svm(examples: &[LabeledExample], dim: usize) -> Result<SvmSolution> {
    Ok(min_norm_point(&ConeSlice::from_examples(examples, 1.0, dim)?)?.1)
}

/// Mode of the standard Gaussian truncated to the slice: its min-norm point.
pub fn truncated_gaussian_mode(cone: &ConeSlice) -> Result<Vec<f64>> {
    let (theta, sol) = min_norm_point(cone)?;
    if !sol.feasible {
        return Err(Error::Infeasible("slice is empty".into()));
    }
    Ok(theta)
}

/// Projection of the origin onto the slice by Dykstra's alternating
/// projections over the half-spaces. Slow but independent of [`ldp`].
pub fn dykstra_min_norm(cone: &ConeSlice, tol: f64, max_iter: usize) -> Vec<f64> {
    let m = cone.rows.len();
    let mut x = vec![0.0; cone.dim];
    let mut corr = vec![vec![0.0; cone.dim]; m];
    for _ in 0..max_iter {
        let prev = x.clone();
        for (a, p) in cone.rows.iter().zip(corr.iter_mut()) {
            let y: Vec<f64> = x.iter().zip(p.iter()).map(|(x, p)| x + p).collect();
            let slack = cone.gamma - dot(a, &y);
            let aa = dot(a, a);
            let proj: Vec<f64> = if slack > 0.0 && aa > 0.0 {
                y.iter().zip(a).map(|(y, a)| y + slack / aa * a).collect()
            } else {
                y.clone()
            };
            for k in 0..cone.dim {
                p[k] = y[k] - proj[k];
            }
            x = proj;
        }
        let moved: f64 = x.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < tol {
            break;
        }
    }
    x
}

/// `n` standard Gaussian points labeled by a uniformly random direction `u`,
/// keeping only points with `|<u, x>| >= min_margin`. Returns the data and `u`.
pub fn random_separable_instance(d: usize, n: usize, min_margin: f64, seed: u64) -> (Vec<LabeledExample>, Vec<f64>) {
    use rand::Rng;
    let mut rng = crate::rng::stream(seed, crate::rng::Purpose::Check, 1000);
    let u = uniform_sphere(d, &mut rng);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        let s = dot(&x, &u);
        if s.abs() < min_margin {
            continue;
        }
        let y = if s > 0.0 { Label::Pos } else { Label::Neg };
        out.push(LabeledExample::new(x, y));
    }
    (out, u)
}
