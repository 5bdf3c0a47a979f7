//! The exponential-weights posterior for a data prefix under an isotropic
//! Gaussian prior `N(0, B^2 I)`.
//!
//! For a prefix of `t - 1` examples the potential is
//! `V_t(theta) = sum_i logistic_loss(y_i <x_i, theta>) + |theta|^2 / (2 B^2)`,
//! and `rho_t ∝ exp(-V_t)`. A temper `v ∈ [0, 1]` on the newest prefix
//! example gives the intermediate rungs `rho_{t,v} ∝ g^v rho_{t-1}` used by
//! the sampler's bridge.

#[cfg(feature = "exact")]
mod oracle;

#[cfg(feature = "exact")]
pub use oracle::{renyi2_between_rungs, DensityOracle};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm, norm_sq};
use crate::loss::{logistic_loss, loss_grad_scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
}

impl Label {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Neg => -1.0,
            Label::Pos => 1.0,
        }
    }

    pub fn from_sign(s: f64) -> Result<Self> {
        if s == 1.0 {
            Ok(Label::Pos)
        } else if s == -1.0 {
            Ok(Label::Neg)
        } else {
            Err(Error::invalid(format!("label {s} is not ±1")))
        }
    }
}

/// A feature vector with its ±1 label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: Vec<f64>,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Vec<f64>, y: Label) -> Self {
        Self { x, y }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `y <x, theta>`.
    #[inline]
    pub fn margin(&self, theta: &[f64]) -> f64 {
        self.y.sign() * dot(&self.x, theta)
    }

    /// The constraint row `y x`.
    pub fn signed(&self) -> Vec<f64> {
        let s = self.y.sign();
        self.x.iter().map(|v| s * v).collect()
    }

    pub fn check_radius(&self, radius: f64) -> Result<()> {
        let n = norm(&self.x);
        if n > radius * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "example norm {n} exceeds configured radius {radius}"
            )));
        }
        Ok(())
    }
}

/// Largest feature norm in a slice of examples (0 for an empty slice).
pub fn radius_of(examples: &[LabeledExample]) -> f64 {
    examples.iter().map(|e| norm(&e.x)).fold(0.0, f64::max)
}

/// A smooth potential `V` whose Gibbs measure `exp(-V)` is a sampling target.
pub trait Potential: Sync {
    fn dim(&self) -> usize;

    /// Returns `V(theta)` and writes `∇V(theta)` into `grad`.
    fn value_and_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64;

    fn value(&self, theta: &[f64]) -> f64 {
        let mut g = vec![0.0; self.dim()];
        self.value_and_grad(theta, &mut g)
    }
}

/// Strong convexity `m`, smoothness bound `L` and condition number `L / m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityConstants {
    pub m: f64,
    pub l: f64,
    pub kappa: f64,
}

/// The posterior `rho_{t,v}` for a borrowed prefix of `t - 1` examples.
#[derive(Debug, Clone, Copy)]
pub struct PosteriorSpec<'a> {
    b: f64,
    dim: usize,
    prefix: &'a [LabeledExample],
    temper: f64,
}

impl<'a> PosteriorSpec<'a> {
    pub fn new(b: f64, dim: usize, prefix: &'a [LabeledExample]) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("prior scale B = {b} must be positive")));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        for e in prefix {
            check_dim(dim, e.dim())?;
        }
        Ok(Self {
            b,
            dim,
            prefix,
            temper: 1.0,
        })
    }

    /// The same prefix with the newest example weighted by `v`.
    pub fn with_temper(self, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("temper {v} outside [0, 1]")));
        }
        Ok(Self { temper: v, ..self })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn prefix(&self) -> &'a [LabeledExample] {
        self.prefix
    }

    pub fn temper(&self) -> f64 {
        self.temper
    }

    /// The round index `t` this posterior is used for (prefix length + 1).
    pub fn round(&self) -> usize {
        self.prefix.len() + 1
    }

    #[inline]
    fn weight(&self, i: usize) -> f64 {
        if i + 1 == self.prefix.len() {
            self.temper
        } else {
            1.0
        }
    }

    pub fn potential(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.dim, theta.len())?;
        Ok(self.potential_unchecked(theta))
    }

    pub fn grad_potential(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, theta.len())?;
        let mut g = vec![0.0; self.dim];
        self.value_and_grad(theta, &mut g);
        Ok(g)
    }

    pub(crate) fn potential_unchecked(&self, theta: &[f64]) -> f64 {
        let data: f64 = self
            .prefix
            .iter()
            .enumerate()
            .map(|(i, e)| self.weight(i) * logistic_loss(e.margin(theta)))
            .sum();
        data + norm_sq(theta) / (2.0 * self.b * self.b)
    }

    /// Loss of the newest prefix example, `-log g_{t-1}(theta)`.
    #[cfg(feature = "exact")]
    pub(crate) fn newest_loss(&self, theta: &[f64]) -> f64 {
        self.prefix
            .last()
            .map_or(0.0, |e| logistic_loss(e.margin(theta)))
    }

    /// `m = 1/B^2`, `L = R^2 (t-1)/4 + 1/B^2`, `kappa = 1 + B^2 R^2 (t-1)/4`.
    pub fn constants(&self, r: f64) -> ConvexityConstants {
        let m = 1.0 / (self.b * self.b);
        let n = self.prefix.len() as f64;
        let l = r * r * n / 4.0 + m;
        ConvexityConstants {
            m,
            l,
            kappa: 1.0 + self.b * self.b * r * r * n / 4.0,
        }
    }
}

impl Potential for PosteriorSpec<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value_and_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let inv_b2 = 1.0 / (self.b * self.b);
        for (g, t) in grad.iter_mut().zip(theta) {
            *g = t * inv_b2;
        }
        let mut v = 0.5 * inv_b2 * norm_sq(theta);
        for (i, e) in self.prefix.iter().enumerate() {
            let w = self.weight(i);
            if w == 0.0 {
                continue;
            }
            let z = e.margin(theta);
            v += w * logistic_loss(z);
            axpy(w * loss_grad_scalar(z) * e.y.sign(), &e.x, grad);
        }
        v
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.potential_unchecked(theta)
    }
}
