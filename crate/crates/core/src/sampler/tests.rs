use super::*;
use crate::posterior::{Label, LabeledExample, PosteriorSpec, Potential};

struct Flat(usize);

impl Potential for Flat {
    fn dim(&self) -> usize {
        self.0
    }
    fn value_and_grad(&self, _: &[f64], grad: &mut [f64]) -> f64 {
        grad.fill(0.0);
        3.0
    }
}

struct StdGaussian(usize);

impl Potential for StdGaussian {
    fn dim(&self) -> usize {
        self.0
    }
    fn value_and_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        grad.copy_from_slice(theta);
        0.5 * theta.iter().map(|t| t * t).sum::<f64>()
    }
}

fn prefix_1d() -> Vec<LabeledExample> {
    [(0.9, Label::Pos), (-0.4, Label::Pos), (0.7, Label::Neg), (1.0, Label::Pos)]
        .into_iter()
        .map(|(x, y)| LabeledExample::new(vec![x], y))
        .collect()
}

#[test]
fn flat_potential_always_accepts() {
    let target = Flat(3);
    let mut s = ChainState::seeded(vec![0.1, -0.2, 0.3], 0.7, 1, 0).unwrap();
    let prop = vec![1.5, 2.0, -4.0];
    assert!(acceptance_probability(&target, 0.7, &s.theta, &prop) > 1.0 - 1e-12);
    let acc = run_mala(&target, &mut s, 1000);
    assert_eq!(acc, 1000);
    assert_eq!(s.proposed, 1000);
}

#[test]
fn run_mala_matches_repeated_steps() {
    let ex = prefix_1d();
    let spec = PosteriorSpec::new(2.0, 1, &ex).unwrap();
    let mut a = ChainState::seeded(vec![0.3], 0.4, 9, 3).unwrap();
    let mut b = a.clone();
    run_mala(&spec, &mut a, 200);
    for _ in 0..200 {
        mala_step(&spec, &mut b);
    }
    assert_eq!(a.theta, b.theta);
    assert_eq!(a.accepted, b.accepted);
}

#[test]
fn same_seed_same_chain() {
    let target = StdGaussian(2);
    let run = |seed| {
        let mut s = ChainState::seeded(vec![0.0, 0.0], 0.5, seed, 0).unwrap();
        run_mala(&target, &mut s, 100);
        s.theta
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5), run(6));
}

#[test]
fn gaussian_moments() {
    let target = StdGaussian(1);
    let mut s = ChainState::seeded(vec![2.0], 0.8, 11, 0).unwrap();
    run_mala(&target, &mut s, 1000);
    let n = 200_000;
    let (mut m1, mut m2) = (0.0, 0.0);
    for _ in 0..n {
        run_mala(&target, &mut s, 1);
        m1 += s.theta[0];
        m2 += s.theta[0] * s.theta[0];
    }
    m1 /= n as f64;
    m2 /= n as f64;
    assert!(m1.abs() < 0.03, "mean {m1}");
    assert!((m2 - 1.0).abs() < 0.04, "second moment {m2}");
}

#[test]
fn rejects_nonpositive_step() {
    assert!(ChainState::seeded(vec![0.0], 0.0, 0, 0).is_err());
    assert!(ChainState::seeded(vec![0.0], f64::NAN, 0, 0).is_err());
}

#[test]
fn ladder_examples() {
    let l = build_ladder(1.0, 10.0, 0.1, 0.5, StepCount::Fixed(3)).unwrap();
    assert!((l.delta - 0.05).abs() < 1e-15);
    assert_eq!(l.rungs, 20);
    assert!((l.rung_budget - 0.005).abs() < 1e-15);
    assert_eq!(l.transitions(), 60);
    assert_eq!(l.rung(20), 1.0);

    let one = build_ladder(0.5, 1.0, 0.1, 0.5, StepCount::Fixed(1)).unwrap();
    assert_eq!(one.delta, 1.0);
    assert_eq!(one.rungs, 1);

    assert!(build_ladder(1.0, 1.0, 0.1, 1.0, StepCount::Fixed(1)).is_err());
    assert!(build_ladder(1.0, 1.0, 0.0, 0.5, StepCount::Fixed(1)).is_err());
}

#[test]
fn step_count_examples() {
    assert_eq!(step_count_for_accuracy(1.0, 1, (-1.0f64).exp(), 1, 1.0), 1);
    // log(K / eps) below one is clamped.
    assert_eq!(step_count_for_accuracy(2.0, 4, 5.0, 4, 1.0), 4);
    let n = step_count_for_accuracy(3.0, 2, 1e-4, 10, 1.0);
    assert_eq!(n, (3.0 * 2f64.sqrt() * 1e5f64.ln()).ceil() as usize);
}

#[test]
fn zero_step_bridge_is_identity() {
    let ex = prefix_1d();
    let spec = PosteriorSpec::new(2.0, 1, &ex).unwrap();
    let ladder = build_ladder(1.0, 2.0, 0.1, 0.5, StepCount::Fixed(0)).unwrap();
    let mut s = ChainState::seeded(vec![0.25], 0.1, 0, 0).unwrap();
    let before = s.clone();
    assert_eq!(bridge_round(&mut s, spec, &ladder).unwrap(), 0);
    assert_eq!(s.theta, before.theta);
    assert_eq!(s.proposed, 0);
}

#[test]
fn ledger_sums_fresh_budgets() {
    let mut ledger = BudgetLedger::default();
    let eps = [0.01, 0.002, 0.3, 1e-7, 0.04];
    let mut running = 0.0;
    for (i, &e) in eps.iter().enumerate() {
        let b = ledger.record(e, i as u64);
        assert_eq!(b.err_inherited, running);
        running += e;
        assert_eq!(b.total(), running);
    }
    assert_eq!(ledger.cumulative_error(), eps.iter().sum::<f64>());
    assert_eq!(ledger.total_transitions(), 10);
}

#[test]
fn adaptation_reaches_window_on_gaussian() {
    let target = StdGaussian(2);
    let mut s = ChainState::seeded(vec![0.0, 0.0], 1.0, 2, 0).unwrap();
    let cfg = AdaptConfig {
        pilot: 200,
        ..AdaptConfig::default()
    };
    let rep = adapt_step_size_with(&target, &mut s, 50.0, &cfg);
    assert!(rep.reached, "{rep:?}");
    assert!(rep.h < 50.0);
    assert_eq!(rep.transitions, 200 * rep.batches as u64);
}

#[test]
fn initial_step_size_formula() {
    let h = initial_step_size(1.0, 2.0, 5);
    assert!((h - 1.0 / (1e-3 + 1.0 + 0.25)).abs() < 1e-15);
}

#[test]
fn ensemble_refuses_skipping_rounds() {
    let ex = prefix_1d();
    let mut ens = ChainEnsemble::from_prior(4, 2.0, 1, 0).unwrap();
    let spec = PosteriorSpec::new(2.0, 1, &ex[..2]).unwrap();
    assert!(ens.advance(spec, 1.0, 0.01, &TheoryConfig::new(4)).is_err());
}

#[test]
fn practical_round_shapes() {
    let ex = prefix_1d();
    let spec = PosteriorSpec::new(2.0, 1, &ex).unwrap();
    let mut s = ChainState::seeded(vec![0.0], 1.0, 3, 0).unwrap();
    let cfg = PracticalConfig::default();
    let (samples, stats) = practical_round(&mut s, spec, 1.0, &cfg).unwrap();
    assert_eq!(samples.len(), 24);
    assert_eq!(stats.round, 5);
    assert!(stats.acceptance > 0.0 && stats.acceptance <= 1.0);
    assert!(stats.transitions >= 34);
}

#[cfg(feature = "exact")]
mod against_quadrature {
    use super::*;
    use crate::posterior::DensityOracle;

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn bridged_chains_match_posterior_cdf() {
        let ex = prefix_1d();
        let b = 2.0;
        let n_chains = 3000;
        let mut ens = ChainEnsemble::from_prior(n_chains, b, 1, 17).unwrap();
        for t in 2..=ex.len() + 1 {
            let spec = PosteriorSpec::new(b, 1, &ex[..t - 1]).unwrap();
            let stats = ens.advance(spec, 1.0, 1e-3, &TheoryConfig::new(n_chains)).unwrap();
            assert!(stats.acceptance > 0.3);
        }
        let spec = PosteriorSpec::new(b, 1, &ex).unwrap();
        let oracle = DensityOracle::new(spec).unwrap();
        let xs: Vec<f64> = ens.samples().map(|s| s[0]).collect();
        let d = ks_statistic(xs, |x| oracle.cdf(x).unwrap());
        // 0.1% critical value of the one-sample KS test.
        let crit = 1.95 / (n_chains as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds {crit}");
    }

    #[test]
    fn practical_chain_matches_posterior_mean() {
        let ex = prefix_1d();
        let spec = PosteriorSpec::new(2.0, 1, &ex).unwrap();
        let oracle = DensityOracle::new(spec).unwrap();
        let mean = oracle.expect(|th| th[0]).unwrap();
        let mut s = ChainState::seeded(vec![0.0], 1.0, 21, 0).unwrap();
        let cfg = PracticalConfig {
            retain: 40_000,
            ..PracticalConfig::default()
        };
        let (samples, _) = practical_round(&mut s, spec, 1.0, &cfg).unwrap();
        let est = samples.iter().map(|v| v[0]).sum::<f64>() / samples.len() as f64;
        assert!((est - mean).abs() < 0.05, "chain mean {est}, quadrature {mean}");
    }
}
