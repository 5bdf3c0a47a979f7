//! Desk-scale experiments with built-in pass/fail verdicts.

use serde::Serialize;

use super::comparator::comparator_loss;
use super::online::run_online;
#[cfg(feature = "exact")]
use super::stats::linear_fit;
use crate::data_io::{gen_hazan, HazanConfig};
use crate::error::{Error, Result};
use crate::geometry::random_separable_instance;
use crate::par;
use crate::posterior::{radius_of, LabeledExample};
use crate::predictors::{McPractical, OnlinePredictor, Ogd};
use crate::rng::derive_seed;
use crate::sampler::PracticalConfig;

/// The fixed separable instance used by the plateau check: 20 points in
/// the plane at margin at least 0.3 from a random unit direction `u`,
/// rescaled to radius 1. Returns the examples and `u`.
pub fn plateau_instance() -> (Vec<LabeledExample>, Vec<f64>) {
    let (data, u) = random_separable_instance(2, 20, 0.3, 77);
    let r = radius_of(&data);
    let data = data
        .into_iter()
        .map(|e| LabeledExample::new(e.x.iter().map(|v| v / r).collect(), e.y))
        .collect();
    (data, u)
}

/// Regret of exact EW on Gaussian-design data at several horizons, fitted
/// against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeCheck {
    pub ns: Vec<usize>,
    pub regrets: Vec<f64>,
    pub slope: f64,
    pub ratio: f64,
    pub ratio_bound: f64,
    pub passed: bool,
}

/// Mean exact-EW regret over `seeds` Gaussian-design sequences (d = 2,
/// `|theta*| = b_true`) at each horizon in `ns`, evaluated on nested prefixes
/// of one sequence per seed. Passes when the least-squares slope against
/// `log n` is positive and `R_last / R_first <= tol * log(n_last) / log(n_first)`.
#[cfg(feature = "exact")]
pub fn regret_slope_check(ns: &[usize], b: f64, b_true: f64, seeds: usize, tol: f64, seed: u64) -> Result<SlopeCheck> {
    use crate::data_io::{gen_gaussian_design, GaussianDesignConfig};
    use crate::predictors::exact_cumulative_losses;

    if ns.len() < 2 || seeds == 0 {
        return Err(Error::invalid("slope check needs two horizons and one seed"));
    }
    let n_max = *ns.iter().max().unwrap_or(&0);
    let per_seed = par::map_range(seeds, |s| -> Result<Vec<f64>> {
        let data = gen_gaussian_design(&GaussianDesignConfig::diagonal(n_max, 2, b_true, derive_seed(seed, s as u64)))?;
        let ex = data.examples();
        let losses = exact_cumulative_losses(ex, b, 2, ns)?;
        ns.iter()
            .zip(losses)
            .map(|(&n, l)| Ok(l - comparator_loss(&ex[..n], 2, b)?.value))
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let regrets: Vec<f64> = (0..ns.len())
        .map(|i| per_seed.iter().map(|r| r[i]).sum::<f64>() / seeds as f64)
        .collect();
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let (_, slope) = linear_fit(&logs, &regrets);
    let ratio = regrets[ns.len() - 1] / regrets[0];
    let ratio_bound = tol * logs[ns.len() - 1] / logs[0];
    Ok(SlopeCheck {
        ns: ns.to_vec(),
        passed: slope > 0.0 && ratio <= ratio_bound && regrets.iter().all(|r| r.is_finite()),
        regrets,
        slope,
        ratio,
        ratio_bound,
    })
}

/// Exact cumulative loss across prior scales on one separable instance,
/// next to the geometric upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauCheck {
    pub b_critic: f64,
    pub bs: Vec<f64>,
    pub losses: Vec<f64>,
    pub bounds: Vec<f64>,
    pub relative_spread: f64,
    pub passed: bool,
}

/// Exact `L_n^B` at `B = m * B_critic` for each multiplier, on data that is
/// separable along unit direction `u`. Passes when `(max - min) / min <= rel_tol`
/// and every loss sits below its bound.
#[cfg(feature = "exact")]
pub fn plateau_check(
    data: &[LabeledExample],
    u: &[f64],
    multipliers: &[f64],
    rel_tol: f64,
) -> Result<PlateauCheck> {
    use crate::geometry::{cumulative_loss_bound, margin_report};
    use crate::predictors::exact_cumulative_losses;

    let n = data.len();
    let report = margin_report(data, u, n, 1.0)?;
    if !report.separable || report.dim != 2 {
        return Err(Error::invalid("plateau check needs separable two-dimensional data"));
    }
    let bs: Vec<f64> = multipliers.iter().map(|m| m * report.b_critic).collect();
    let losses = par::map_range(bs.len(), |i| exact_cumulative_losses(data, bs[i], 2, &[n]).map(|v| v[0]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let bounds = bs
        .iter()
        .map(|&b| cumulative_loss_bound(&report, b, 2))
        .collect::<Result<Vec<_>>>()?;
    let lo = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let relative_spread = (hi - lo) / lo;
    Ok(PlateauCheck {
        b_critic: report.b_critic,
        passed: relative_spread <= rel_tol && losses.iter().zip(&bounds).all(|(l, b)| l <= b),
        bs,
        losses,
        bounds,
        relative_spread,
    })
}

/// One horizon of the adversarial experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstOfChiRow {
    pub n: usize,
    /// Mean regret across seeds for `chi = +1` and `chi = -1`.
    pub ew_by_chi: [f64; 2],
    pub ogd_by_chi: [f64; 2],
    pub ew: f64,
    pub ogd: f64,
    pub ew_below_ogd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstOfChi {
    pub seeds: usize,
    pub rows: Vec<WorstOfChiRow>,
    pub growth: f64,
    pub finite: bool,
    /// `R_last / R_first < n_last / n_first`.
    pub sublinear: bool,
    /// EW below OGD at every horizon.
    pub ordered: bool,
    pub passed: bool,
}

/// For each horizon, the maximum over `chi` of the mean regret across
/// `seeds` sequences of the adversarial one-dimensional process, for EW in
/// practical mode (smoothed with `alpha = 1/(2n)`) and for OGD on the same
/// sequences. Passes when every value is finite, EW's regret grows more
/// slowly than `n` between the first and last horizon, and EW beats OGD at
/// every horizon.
pub fn worst_of_chi(ns: &[usize], seeds: usize, cfg: PracticalConfig, seed: u64) -> Result<WorstOfChi> {
    if ns.len() < 2 || seeds == 0 {
        return Err(Error::invalid("worst-of-chi needs two horizons and one seed"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let jobs = 2 * seeds;
        let regrets = par::map_range(jobs, |j| -> Result<(f64, f64)> {
            let chi = if j < seeds { 1 } else { -1 };
            let s = derive_seed(seed, (n * jobs + j) as u64);
            let hc = HazanConfig::standard(n, chi, s);
            let data = gen_hazan(&hc)?;
            let ex = data.examples();
            let r = data.radius().max(1e-12);
            let comp = comparator_loss(ex, 1, hc.b)?.value;
            let mut ew = McPractical::new(hc.b, 1, r, 0.5 / n as f64, cfg, derive_seed(s, 1))?;
            let mut ogd = Ogd::new(1, hc.b, r)?;
            Ok((final_loss(&mut ew, ex)? - comp, final_loss(&mut ogd, ex)? - comp))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let mean = |part: &[(f64, f64)], f: fn(&(f64, f64)) -> f64| part.iter().map(f).sum::<f64>() / seeds as f64;
        let (pos, neg) = regrets.split_at(seeds);
        let ew_by_chi = [mean(pos, |r| r.0), mean(neg, |r| r.0)];
        let ogd_by_chi = [mean(pos, |r| r.1), mean(neg, |r| r.1)];
        let (ew, ogd) = (ew_by_chi[0].max(ew_by_chi[1]), ogd_by_chi[0].max(ogd_by_chi[1]));
        rows.push(WorstOfChiRow {
            n,
            ew,
            ogd,
            ew_by_chi,
            ogd_by_chi,
            ew_below_ogd: ew < ogd,
        });
    }
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    let growth = last.ew / first.ew;
    let horizon_growth = last.n as f64 / first.n as f64;
    let finite = rows.iter().all(|r| r.ew.is_finite() && r.ogd.is_finite());
    let sublinear = last.ew < horizon_growth * first.ew;
    let ordered = rows.iter().all(|r| r.ew_below_ogd);
    Ok(WorstOfChi {
        seeds,
        rows,
        growth,
        finite,
        sublinear,
        ordered,
        passed: finite && sublinear && ordered,
    })
}

fn final_loss(pred: &mut dyn OnlinePredictor, data: &[LabeledExample]) -> Result<f64> {
    Ok(run_online(pred, data)?.last().map_or(0.0, |l| l.cum_loss))
}
