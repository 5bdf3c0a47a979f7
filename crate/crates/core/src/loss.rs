//! Scalar primitives: sigmoid, logistic loss and the smoothing map.
//!
//! All of these take a logit `z = y * <theta, x>` already multiplied by the
//! label, so the loss of the realized label is `logistic_loss(z)`.

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Prob(f64);

impl Prob {
    pub const HALF: Prob = Prob(0.5);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Prob(p))
        } else {
            Err(Error::invalid(format!("probability {p} outside [0, 1]")))
        }
    }

    /// Clamps into `[0, 1]`; for values that are probabilities up to rounding.
    pub fn saturating(p: f64) -> Self {
        Prob(p.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn complement(self) -> Self {
        Prob(1.0 - self.0)
    }
}

/// `1 / (1 + exp(-z))`, branching on the sign so `exp` never overflows.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-log sigmoid(z) = log(1 + exp(-z))`.
#[inline]
pub fn logistic_loss(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Derivative of [`logistic_loss`]: `-(1 - sigmoid(z)) = -sigmoid(-z)`.
#[inline]
pub fn loss_grad_scalar(z: f64) -> f64 {
    -sigmoid(-z)
}

/// `sigmoid'(z) = sigmoid(z)(1 - sigmoid(z))`.
#[inline]
pub fn sigmoid_prime(z: f64) -> f64 {
    sigmoid(z) * sigmoid(-z)
}

/// Shrinks a Bernoulli parameter toward 1/2: `(1 - alpha) p + alpha / 2`.
pub fn smooth(p: Prob, alpha: f64) -> Result<Prob> {
    check_alpha(alpha)?;
    Ok(Prob::saturating((1.0 - alpha) * p.get() + 0.5 * alpha))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::invalid(format!(
            "smoothing alpha {alpha} outside [0, 1/2]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn sigmoid_examples() {
        assert_eq!(sigmoid(0.0), 0.5);
        let s = sigmoid(40.0);
        assert!(1.0 - s < 1e-17 && s <= 1.0);
        assert_abs_diff_eq!(sigmoid(3f64.ln()), 0.75, epsilon = 1e-15);
        // no overflow at the far tails
        assert_eq!(sigmoid(-1e4), 0.0);
        assert_eq!(sigmoid(1e4), 1.0);
    }

    #[test]
    fn logistic_loss_examples() {
        assert_abs_diff_eq!(logistic_loss(0.0), std::f64::consts::LN_2, epsilon = 1e-15);
        assert!(logistic_loss(40.0) <= 1e-17);
        // log(1 + e), evaluated directly
        assert_abs_diff_eq!(logistic_loss(-1.0), (1.0 + std::f64::consts::E).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(logistic_loss(-1e4), 1e4, epsilon = 1e-9);
    }

    #[test]
    fn smooth_examples() {
        let p = |v| Prob::new(v).unwrap();
        assert_eq!(smooth(p(0.3), 0.0).unwrap().get(), 0.3);
        assert_eq!(smooth(p(0.0), 0.5).unwrap().get(), 0.25);
        for a in [0.0, 0.1, 0.33, 0.5] {
            assert_eq!(smooth(p(0.5), a).unwrap().get(), 0.5);
        }
        assert!(smooth(p(0.5), 0.51).is_err());
        assert!(smooth(p(0.5), -0.1).is_err());
        assert!(Prob::new(1.5).is_err());
    }

    #[test]
    fn grad_examples() {
        assert_eq!(loss_grad_scalar(0.0), -0.5);
        assert!(loss_grad_scalar(40.0).abs() <= 1e-17);
        let h = 1e-5;
        let fd = (logistic_loss(0.7 + h) - logistic_loss(0.7 - h)) / (2.0 * h);
        assert_abs_diff_eq!(loss_grad_scalar(0.7), fd, epsilon = 1e-6);
    }

    #[test]
    fn grad_matches_central_differences_at_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..100 {
            let z: f64 = rng.random_range(-20.0..20.0);
            let fd = (logistic_loss(z + h) - logistic_loss(z - h)) / (2.0 * h);
            assert_abs_diff_eq!(loss_grad_scalar(z), fd, epsilon = 1e-6);
        }
    }

    proptest! {
        #[test]
        fn sigmoid_is_antisymmetric(z in -1e4f64..1e4) {
            prop_assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() <= 1e-15);
        }

        #[test]
        fn sigmoid_dominates_one_minus_exp(z in 0f64..50.0) {
            // complement form: 1 - sigmoid(z) = sigmoid(-z) <= exp(-z)
            prop_assert!(sigmoid(-z) <= (-z).exp());
            prop_assert!(sigmoid(z) >= 1.0 - (-z).exp() - f64::EPSILON);
        }

        #[test]
        fn smoothing_costs_at_most_two_alpha(p in 1e-12f64..=1.0, alpha in 0f64..=0.5) {
            let q = smooth(Prob::new(p).unwrap(), alpha).unwrap().get();
            prop_assert!(-q.ln() <= -p.ln() + 2.0 * alpha + 1e-12);
            prop_assert!(q >= alpha / 2.0 && q <= 1.0 - alpha / 2.0 + 1e-16);
        }
    }
}
