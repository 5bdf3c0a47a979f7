use serde::Serialize;

use crate::error::{Error, Result};

/// Quantile of sorted data with linear interpolation between order
/// statistics (position `q (n - 1)`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub mean: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return Err(Error::EmptySamples);
        }
        v.sort_by(f64::total_cmp);
        Ok(Self {
            median: quantile_sorted(&v, 0.5),
            q25: quantile_sorted(&v, 0.25),
            q75: quantile_sorted(&v, 0.75),
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

/// Ordinary least-squares fit `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_match_hand_values() {
        let s = Summary::of([4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.q25, s.median, s.q75, s.mean), (2.0, 3.0, 4.0, 3.0));
        let s = Summary::of([1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((s.q25, s.median, s.q75), (1.75, 2.5, 3.25));
        assert_eq!(Summary::of([7.0]).unwrap().q75, 7.0);
        assert!(Summary::of([]).is_err());
    }

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 + 2.0 * v).collect();
        let (a, b) = linear_fit(&x, &y);
        assert!((a - 0.5).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
    }
}
