use serde::Serialize;

use super::online::run_online;
use crate::data_io::{gen_gaussian_design, GaussianDesignConfig};
use crate::error::Result;
use crate::geometry::{
    cap_probability_check, chi_square_tail_check, cone_cap_inclusion_check, margin_report, random_separable_instance,
};
use crate::loss::{logistic_loss, smooth, Prob};
use crate::predictors::{corollary_schedule, McPractical};
use crate::rng::derive_seed;
use crate::sampler::PracticalConfig;

/// Outcome of one numerical property check. `slack` is how far the measured
/// value sits inside its bound (negative when the check fails).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub instance: String,
}

impl Check {
    /// Passes when `measured <= bound`.
    fn at_most(name: &str, instance: String, measured: f64, bound: f64) -> Self {
        Self {
            name: name.to_owned(),
            passed: measured <= bound,
            measured,
            bound,
            slack: bound - measured,
            instance,
        }
    }

    /// Passes when `measured >= bound`.
    fn at_least(name: &str, instance: String, measured: f64, bound: f64) -> Self {
        Self {
            name: name.to_owned(),
            passed: measured >= bound,
            measured,
            bound,
            slack: measured - bound,
            instance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl LemmaReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs every registered property check with randomness drawn from `seed`.
pub fn verify_lemmas(seed: u64) -> Result<LemmaReport> {
    let mut checks = Vec::new();
    checks.extend(smoothing_checks(seed)?);
    checks.extend(chernoff_checks()?);
    #[cfg(feature = "exact")]
    checks.extend(renyi_checks(seed)?);
    checks.push(sigmoid_grid_check());
    checks.extend(cap_checks(seed)?);
    checks.extend(alpha_t1_checks(seed)?);
    checks.extend(chi_tail_checks(seed)?);
    checks.extend(cap_inclusion_checks(seed)?);
    Ok(LemmaReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Smoothing costs at most `2 alpha` per round on the predictions of an
/// actual EW run.
fn smoothing_checks(seed: u64) -> Result<Vec<Check>> {
    let n = 30;
    let data = gen_gaussian_design(&GaussianDesignConfig::diagonal(n, 2, 3.0, derive_seed(seed, 1)))?;
    let mut pred = McPractical::new(5.0, 2, data.radius(), 0.0, PracticalConfig::default(), derive_seed(seed, 2))?;
    let logs = run_online(&mut pred, data.examples())?;
    let mut out = Vec::new();
    for alpha in [1.0 / (2.0 * n as f64), 0.05, 0.5] {
        let mut excess = 0.0;
        for (log, e) in logs.iter().zip(data.examples()) {
            let p_true = if e.y.sign() > 0.0 { log.p_plus } else { 1.0 - log.p_plus };
            let p = Prob::new(p_true)?;
            excess += -smooth(p, alpha)?.get().ln() + p.get().ln();
        }
        out.push(Check::at_most(
            "smoothing_additive_cost",
            format!("gaussian design d=2 n={n} alpha={alpha}"),
            excess,
            2.0 * alpha * n as f64,
        ));
    }
    Ok(out)
}

/// `alpha s >= 16 log(1/delta_t)` for the default schedule.
fn chernoff_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in [1, 5, 10, 100, 1000] {
        for delta in [0.01, 0.1, 0.5] {
            let s = corollary_schedule(n, delta)?;
            out.push(Check::at_least(
                "chernoff_schedule_hypothesis",
                format!("n={n} delta={delta}"),
                s.alpha * s.s as f64,
                16.0 * (1.0 / s.delta_t).ln(),
            ));
        }
    }
    Ok(out)
}

/// Adjacent-rung Rényi-2 divergence against `dv^2 R^2 B^2` in one dimension.
#[cfg(feature = "exact")]
fn renyi_checks(seed: u64) -> Result<Vec<Check>> {
    use crate::posterior::{radius_of, PosteriorSpec};
    let data = gen_gaussian_design(&GaussianDesignConfig::diagonal(6, 1, 2.0, derive_seed(seed, 3)))?;
    let mut out = Vec::new();
    for t in [1, 3, 6] {
        let prefix = &data.examples()[..t];
        let r = radius_of(prefix);
        for b in [0.5, 1.0, 3.0] {
            for (v, dv) in [(0.0, 0.1), (0.5, 0.25), (0.0, 1.0)] {
                let spec = PosteriorSpec::new(b, 1, prefix)?;
                let d2 = crate::posterior::renyi2_between_rungs(spec, v, dv)?;
                out.push(Check::at_most(
                    "renyi_rung_bound",
                    format!("d=1 prefix={t} B={b} v={v} dv={dv}"),
                    d2,
                    dv * dv * r * r * b * b,
                ));
            }
        }
    }
    Ok(out)
}

/// `sigmoid(z) >= 1 - exp(-z)` on `z = 0, 0.01, ..., 40`, in the equivalent
/// form `log(1 + e^z) >= z`, which avoids cancellation near 1.
fn sigmoid_grid_check() -> Check {
    let worst = (0..=4000)
        .map(|i| {
            let z = i as f64 * 0.01;
            logistic_loss(-z) - z
        })
        .fold(f64::INFINITY, f64::min);
    Check::at_least("sigmoid_exponential_lower_bound", "z in [0, 40] step 0.01".into(), worst, 0.0)
}

/// Cap probability against `c_d (1 - t^2)^((d-1)/2)` within three standard errors.
fn cap_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, d) in [2usize, 3, 5, 10].into_iter().enumerate() {
        // Caps too thin to resolve with this many draws are skipped.
        let ts: &[f64] = if d <= 5 { &[0.1, 0.3, 0.6, 0.9] } else { &[0.1, 0.3, 0.6] };
        for (j, &t) in ts.iter().enumerate() {
            let c = cap_probability_check(d, t, 40_000, derive_seed(seed, 100 + 10 * i as u64 + j as u64))?;
            out.push(Check::at_least(
                "cap_probability_lower_bound",
                format!("d={d} t={t} stderr={:.3e}", c.stderr),
                c.empirical + 3.0 * c.stderr,
                c.lower_bound,
            ));
        }
    }
    Ok(out)
}

/// `alpha(t1) >= gamma / (2 (2 + sqrt 2))` on random separable instances.
fn alpha_t1_checks(seed: u64) -> Result<Vec<Check>> {
    let c = 1.0 / (2.0 * (2.0 + 2f64.sqrt()));
    let mut worst: Option<Check> = None;
    for i in 0..100u64 {
        let d = 2 + (i as usize % 4);
        let (data, u) = random_separable_instance(d, 20, 0.05, derive_seed(seed, 1000 + i));
        let r = margin_report(&data, &u, 20, 1.0)?;
        let check = Check::at_least(
            "alpha_t1_lower_bound",
            format!("instance {i} d={d} gamma={:.4}", r.gamma),
            r.alpha_t1 / r.gamma,
            c,
        );
        if worst.as_ref().is_none_or(|w| check.slack < w.slack) {
            worst = Some(check);
        }
    }
    Ok(worst.into_iter().collect())
}

/// Empirical `P(chi^2_d >= d - 1) >= 1/2` for `d <= 10`.
fn chi_tail_checks(seed: u64) -> Result<Vec<Check>> {
    (1..=10)
        .map(|d| {
            let p = chi_square_tail_check(d, 50_000, derive_seed(seed, 200 + d as u64))?;
            Ok(Check::at_least("chi_square_tail", format!("d={d}"), p, 0.5))
        })
        .collect()
}

/// No sampled direction of the cap `Cap(u, t1)` leaves the margin floor.
fn cap_inclusion_checks(seed: u64) -> Result<Vec<Check>> {
    [2usize, 3, 5]
        .into_iter()
        .map(|d| {
            let (data, u) = random_separable_instance(d, 25, 0.1, derive_seed(seed, 300 + d as u64));
            let r = margin_report(&data, &u, 25, 1.0)?;
            let ok = cone_cap_inclusion_check(&data, &u, r.t1, 10_000, derive_seed(seed, 400 + d as u64))?;
            Ok(Check::at_least(
                "cap_in_cone",
                format!("d={d} n=25 t1={:.4}", r.t1),
                if ok { 1.0 } else { 0.0 },
                1.0,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_and_serialize() {
        let rep = verify_lemmas(7).unwrap();
        let failed: Vec<_> = rep.failures().collect();
        assert!(failed.is_empty(), "{failed:?}");
        let names: std::collections::BTreeSet<_> = rep.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.len() >= 8, "{names:?}");
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["passed"], true);
    }
}
