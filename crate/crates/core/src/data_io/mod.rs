//! Datasets: LIBSVM text files, the two synthetic generators, and seeded
//! permutations.

mod generators;
mod libsvm;

pub use generators::{gen_gaussian_design, gen_hazan, GaussianDesignConfig, GeneratorSpec, HazanConfig};
pub use libsvm::{parse_libsvm, read_libsvm, serialize_libsvm, write_libsvm, ParseOptions};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::norm;
use crate::posterior::{radius_of, LabeledExample};
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    LibsvmFile,
    Hazan1d,
    GaussianDesign,
    Inline,
}

/// An ordered list of labeled examples of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    dim: usize,
    radius: f64,
    source: Source,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>, dim: usize, source: Source) -> Result<Self> {
        for e in &examples {
            check_dim(dim, e.dim())?;
        }
        let radius = radius_of(&examples);
        Ok(Self {
            examples,
            dim,
            radius,
            source,
        })
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn into_examples(self) -> Vec<LabeledExample> {
        self.examples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `max_t |x_t|`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Keeps the first `n` examples.
    pub fn truncated(mut self, n: usize) -> Result<Self> {
        if n > self.examples.len() {
            return Err(Error::invalid(format!(
                "requested {n} examples but the dataset has {}",
                self.examples.len()
            )));
        }
        self.examples.truncate(n);
        self.radius = radius_of(&self.examples);
        Ok(self)
    }

    /// Scales every nonzero feature vector to unit norm.
    pub fn normalized(mut self) -> Self {
        for e in &mut self.examples {
            let n = norm(&e.x);
            if n > 0.0 {
                e.x.iter_mut().for_each(|v| *v /= n);
            }
        }
        self.radius = radius_of(&self.examples);
        self
    }

    /// Fisher-Yates shuffle driven by the permutation stream of `seed`.
    pub fn permuted(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.examples.shuffle(&mut rng::stream(seed, Purpose::Permutation, 0));
        out
    }
}
