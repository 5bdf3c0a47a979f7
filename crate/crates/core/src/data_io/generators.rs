use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, Source};
use crate::error::{Error, Result};
use crate::loss::sigmoid;
use crate::posterior::{Label, LabeledExample};
use crate::rng::{self, Purpose};

/// The adversarial one-dimensional process: `x = 1 - sqrt(eps)/(2B)` with
/// label `+1` with probability `sqrt(eps)/(2B) + chi eps / B`, and
/// `x = sqrt(eps)/(2B)` with label `-1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazanConfig {
    pub n: usize,
    pub b: f64,
    pub eps: f64,
    pub chi: i8,
    pub seed: u64,
}

impl HazanConfig {
    /// `B = log n`, `eps = 0.01`.
    pub fn standard(n: usize, chi: i8, seed: u64) -> Self {
        Self {
            n,
            b: (n as f64).ln(),
            eps: 0.01,
            chi,
            seed,
        }
    }

    pub fn positive_probability(&self) -> f64 {
        self.eps.sqrt() / (2.0 * self.b) + f64::from(self.chi) * self.eps / self.b
    }

    /// `(x_+, x_-)`, the feature values attached to each label.
    pub fn support(&self) -> (f64, f64) {
        let s = self.eps.sqrt() / (2.0 * self.b);
        (1.0 - s, s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::invalid(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::invalid(format!("B = {} must be positive", self.b)));
        }
        if self.chi != 1 && self.chi != -1 {
            return Err(Error::invalid(format!("chi = {} must be +1 or -1", self.chi)));
        }
        let p = self.positive_probability();
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("label probability {p} outside (0, 1)")));
        }
        Ok(())
    }
}

pub fn gen_hazan(cfg: &HazanConfig) -> Result<Dataset> {
    cfg.validate()?;
    let p = cfg.positive_probability();
    let (x_pos, x_neg) = cfg.support();
    let mut rng = rng::stream(cfg.seed, Purpose::Data, 0);
    let examples = (0..cfg.n)
        .map(|_| {
            if rng.random::<f64>() < p {
                LabeledExample::new(vec![x_pos], Label::Pos)
            } else {
                LabeledExample::new(vec![x_neg], Label::Neg)
            }
        })
        .collect();
    Dataset::new(examples, 1, Source::Hazan1d)
}

/// `x_t ~ N(0, I_d)`, `P(y_t = +1 | x_t) = sigma(<x_t, theta_star>)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianDesignConfig {
    pub n: usize,
    pub d: usize,
    pub theta_star: Vec<f64>,
    pub seed: u64,
}

impl GaussianDesignConfig {
    /// `theta_star = b_true (1, ..., 1) / sqrt(d)`.
    pub fn diagonal(n: usize, d: usize, b_true: f64, seed: u64) -> Self {
        let c = b_true / (d as f64).sqrt();
        Self {
            n,
            d,
            theta_star: vec![c; d],
            seed,
        }
    }
}

pub fn gen_gaussian_design(cfg: &GaussianDesignConfig) -> Result<Dataset> {
    if cfg.d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    crate::error::check_dim(cfg.d, cfg.theta_star.len())?;
    let mut rng = rng::stream(cfg.seed, Purpose::Data, 1);
    let examples = (0..cfg.n)
        .map(|_| {
            let x: Vec<f64> = (0..cfg.d).map(|_| rng.sample(StandardNormal)).collect();
            let p = sigmoid(crate::linalg::dot(&x, &cfg.theta_star));
            let y = if rng.random::<f64>() < p { Label::Pos } else { Label::Neg };
            LabeledExample::new(x, y)
        })
        .collect();
    Dataset::new(examples, cfg.d, Source::GaussianDesign)
}

/// A generator named on the command line, e.g. `hazan:n=300,chi=-1,seed=4`
/// or `gaussian:n=800,d=2,b=5,seed=1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Hazan(HazanConfig),
    Gaussian(GaussianDesignConfig),
}

impl GeneratorSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut kv = std::collections::BTreeMap::new();
        for pair in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got `{pair}`")))?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let num = |k: &str| -> Result<Option<f64>> {
            kv.get(k)
                .map(|v| v.parse::<f64>().map_err(|_| Error::invalid(format!("bad value for {k}: `{v}`"))))
                .transpose()
        };
        let int = |k: &str| -> Result<Option<u64>> {
            kv.get(k)
                .map(|v| v.parse::<u64>().map_err(|_| Error::invalid(format!("bad value for {k}: `{v}`"))))
                .transpose()
        };
        let known: &[&str] = match kind {
            "hazan" => &["n", "b", "eps", "chi", "seed"],
            "gaussian" => &["n", "d", "b", "seed"],
            other => return Err(Error::invalid(format!("unknown generator `{other}`"))),
        };
        if let Some(k) = kv.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::invalid(format!("unknown key `{k}` for generator `{kind}`")));
        }
        let n = int("n")?.ok_or_else(|| Error::invalid("generator needs n"))? as usize;
        let seed = int("seed")?.unwrap_or(0);
        Ok(match kind {
            "hazan" => {
                let chi = num("chi")?.unwrap_or(1.0);
                let mut cfg = HazanConfig::standard(n, if chi < 0.0 { -1 } else { 1 }, seed);
                if let Some(b) = num("b")? {
                    cfg.b = b;
                }
                if let Some(e) = num("eps")? {
                    cfg.eps = e;
                }
                Self::Hazan(cfg)
            }
            _ => {
                let d = int("d")?.unwrap_or(2) as usize;
                Self::Gaussian(GaussianDesignConfig::diagonal(n, d, num("b")?.unwrap_or(1.0), seed))
            }
        })
    }

    pub fn generate(&self) -> Result<Dataset> {
        match self {
            Self::Hazan(c) => gen_hazan(c),
            Self::Gaussian(c) => gen_gaussian_design(c),
        }
    }

    /// The same generator with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            Self::Hazan(c) => Self::Hazan(HazanConfig { seed, ..*c }),
            Self::Gaussian(c) => Self::Gaussian(GaussianDesignConfig { seed, ..c.clone() }),
        }
    }
}
