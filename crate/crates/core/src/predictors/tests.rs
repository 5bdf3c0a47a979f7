use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::*;
use crate::geometry::{angular_fraction_2d, ConeSlice};
use crate::loss::logistic_loss;
use crate::rng::{stream, Purpose};

fn ex(x: &[f64], y: Label) -> LabeledExample {
    LabeledExample::new(x.to_vec(), y)
}

#[test]
fn mc_trivial_cases() {
    let zero = [0.0, 0.0];
    let p = ew_predict_mc([&zero[..]], &[3.0, -1.0], 0.2, Mode::McTheory).unwrap();
    assert_eq!(p.p_plus.get(), 0.5);
    let (a, na) = ([1.3, -0.4], [-1.3, 0.4]);
    let p = ew_predict_mc([&a[..], &na[..]], &[0.7, 2.0], 0.0, Mode::McTheory).unwrap();
    assert!((p.p_plus.get() - 0.5).abs() < 1e-15);
    assert!(matches!(
        ew_predict_mc(std::iter::empty(), &[1.0], 0.0, Mode::McTheory),
        Err(Error::EmptySamples)
    ));
    assert!(ew_predict_mc([&a[..]], &[1.0, 0.0], 0.6, Mode::McTheory).is_err());
}

#[test]
fn smoothed_forecasts_stay_in_band() {
    let th = [[40.0], [35.0]];
    let alpha = 0.1;
    let p = ew_predict_mc(th.iter().map(|v| &v[..]), &[1.0], alpha, Mode::McPractical).unwrap();
    assert!(p.p_plus.get() <= 1.0 - alpha / 2.0 + 1e-15);
    assert!(p.p_minus.get() >= alpha / 2.0 - 1e-15);
}

proptest! {
    #[test]
    fn mc_mean_is_permutation_invariant(seed in 0u64..1000, x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
        let mut rng = stream(seed, Purpose::Check, 0);
        let mut samples: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..2).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let x = [x0, x1];
        let a = ew_predict_mc(samples.iter().map(Vec::as_slice), &x, 0.0, Mode::McTheory).unwrap();
        samples.shuffle(&mut rng);
        let b = ew_predict_mc(samples.iter().map(Vec::as_slice), &x, 0.0, Mode::McTheory).unwrap();
        prop_assert!((a.p_plus.get() - b.p_plus.get()).abs() < 1e-14);
        prop_assert!((a.p_plus.get() + a.p_minus.get() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ogd_stays_in_ball_and_is_proper(seed in 0u64..500, b in 0.1f64..5.0) {
        let mut rng = stream(seed, Purpose::Check, 1);
        let mut ogd = Ogd::new(3, b, 2.0).unwrap().with_fixed_step(10.0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = if rng.random::<bool>() { Label::Pos } else { Label::Neg };
            let p = ogd.predict(&[], &x).unwrap();
            prop_assert!((p.p_plus.get() - sigmoid(dot(&ogd.theta, &x))).abs() < 1e-15);
            ogd.observe(&ex(&x, y)).unwrap();
            prop_assert!(crate::linalg::norm(&ogd.theta) <= b * (1.0 + 1e-12));
        }
    }
}

#[test]
fn schedule_examples() {
    let s = corollary_schedule(10, 0.1).unwrap();
    assert!((s.alpha - 0.05).abs() < 1e-15);
    assert!((s.eps - 5e-5).abs() < 1e-18);
    assert!((s.delta_t - 0.01).abs() < 1e-15);
    // ceil(32000 * ln 100) = ceil(147365.45...)
    assert_eq!(s.s, 147_366);
    assert!(s.alpha * s.s as f64 >= 16.0 * 100f64.ln());
    assert!(s.hypothesis_holds());
    assert!(s.total_failure() <= 0.1 + 1e-15);
    assert_eq!(s.eta, 1.0);
    assert_eq!(corollary_schedule(1, 0.5).unwrap().alpha, 0.5);
    assert!(corollary_schedule(0, 0.1).is_err());
    assert!(corollary_schedule(5, 1.0).is_err());
}

#[test]
fn ogd_examples() {
    let mut ogd = Ogd::new(3, 10.0, 1.0).unwrap().with_fixed_step(1.0);
    assert_eq!(ogd.predict(&[], &[1.0, 2.0, 3.0]).unwrap().p_plus.get(), 0.5);
    ogd.observe(&ex(&[1.0, 0.0, 0.0], Label::Pos)).unwrap();
    assert!((ogd.theta[0] - 0.5).abs() < 1e-15 && ogd.theta[1] == 0.0);
    let default = Ogd::new(2, 3.0, 2.0).unwrap();
    assert!((default.step_size(4) - 0.75).abs() < 1e-15);
}

#[test]
fn ons_keeps_matrix_positive_definite() {
    let mut rng = stream(4, Purpose::Check, 0);
    let mut ons = Ons::new(4, 2.0, 1.5).unwrap();
    assert_eq!(ons.predict(&[], &[1.0, 1.0, 1.0, 1.0]).unwrap().p_plus.get(), 0.5);
    for _ in 0..100 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-0.75..0.75)).collect();
        let y = if rng.random::<bool>() { Label::Pos } else { Label::Neg };
        ons.observe(&ex(&x, y)).unwrap();
        assert!(crate::linalg::norm(&ons.theta) <= 2.0 * (1.0 + 1e-12));
    }
    let a = ons.matrix();
    assert!((a - a.transpose()).amax() < 1e-12);
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    assert!(eig.eigenvalues.min() > 0.0);
    let id = a * ons.inverse();
    assert!((id - nalgebra::DMatrix::<f64>::identity(4, 4)).amax() < 1e-9);
}

#[test]
fn ons_repeated_example_average_loss_decreases() {
    let e = ex(&[0.6, -0.8], Label::Pos);
    let mut ons = Ons::new(2, 3.0, 1.0).unwrap();
    let (mut total, mut prev_avg) = (0.0, f64::INFINITY);
    for t in 1..=500 {
        let p = ons.predict(&[], &e.x).unwrap();
        total += p.loss(e.y);
        let avg = total / t as f64;
        assert!(avg <= prev_avg + 1e-12, "round {t}: {avg} > {prev_avg}");
        prev_avg = avg;
        ons.observe(&e).unwrap();
    }
    // The comparator on the ball puts theta = 3 x: loss log(1 + e^-3).
    let best = logistic_loss(3.0);
    assert!(prev_avg - best < 0.1, "average {prev_avg} vs comparator {best}");
}

#[test]
fn generalized_projection_reaches_sphere() {
    let a = nalgebra::DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
    let z = generalized_projection(&a, &[4.0, -2.0], 1.0);
    assert!((crate::linalg::norm(&z) - 1.0).abs() < 1e-9);
    // First-order optimality: A (z - y) = -mu z for some mu >= 0.
    let r = &a * nalgebra::DVector::from_vec(vec![z[0] - 4.0, z[1] + 2.0]);
    let mu = -r[0] / z[0];
    assert!(mu >= 0.0 && (r[1] + mu * z[1]).abs() < 1e-6);
    assert_eq!(generalized_projection(&a, &[0.1, 0.2], 1.0), vec![0.1, 0.2]);
}

#[test]
fn solid_angle_examples() {
    let mut rng = stream(6, Purpose::MonteCarlo, 0);
    let half = ConeSlice::version_cone(&[ex(&[1.0, 0.0], Label::Pos)], 2).unwrap();
    assert_eq!(solid_angle_predict(&half, &[1.0, 0.0], 10_000, &mut rng).unwrap().p_plus.get(), 1.0);
    let p = solid_angle_predict(&half, &[0.0, 1.0], 100_000, &mut rng).unwrap();
    assert!((p.p_plus.get() - 0.5).abs() < 0.01);
    assert_eq!(solid_angle_predict(&half, &[0.0, 0.0], 10, &mut rng).unwrap().p_plus.get(), 0.5);
    let quad = ConeSlice::version_cone(&[ex(&[1.0, 0.0], Label::Pos), ex(&[0.0, 1.0], Label::Pos)], 2).unwrap();
    let s = 0.5f64.sqrt();
    let p = solid_angle_predict(&quad, &[s, -s], 100_000, &mut rng).unwrap();
    assert!((p.p_plus.get() - 0.5).abs() < 0.01);
}

#[test]
fn solid_angle_matches_angular_fraction() {
    let mut rng = stream(7, Purpose::MonteCarlo, 0);
    let data = [ex(&[0.9, 0.3], Label::Pos), ex(&[-0.2, 1.0], Label::Pos), ex(&[0.5, -0.6], Label::Neg)];
    let cone = ConeSlice::version_cone(&data, 2).unwrap();
    for x in [[1.0, 0.0], [0.3, -1.0], [-1.0, 0.4]] {
        let exact = angular_fraction_2d(&cone, &x).unwrap();
        let mc = solid_angle_predict(&cone, &x, 200_000, &mut rng).unwrap().p_plus.get();
        assert!((exact - mc).abs() < 0.01, "x = {x:?}: exact {exact}, mc {mc}");
    }
}

#[test]
fn solid_angle_narrow_cone_uses_hit_and_run() {
    // An extremely thin 2-D wedge: rejection acceptance is far below 1e-6.
    let data = [ex(&[1e-7, 1.0], Label::Pos), ex(&[1e-7, -1.0], Label::Pos), ex(&[1.0, 0.0], Label::Pos)];
    let cone = ConeSlice::version_cone(&data, 2).unwrap();
    let mut rng = stream(8, Purpose::MonteCarlo, 0);
    let p = solid_angle_predict(&cone, &[1.0, 0.0], 1000, &mut rng).unwrap();
    assert_eq!(p.p_plus.get(), 1.0);
}

#[cfg(feature = "exact")]
mod exact_mode {
    use super::*;
    use crate::posterior::PosteriorSpec;
    use crate::sampler::{ChainEnsemble, TheoryConfig};

    /// `∫ g(theta) phi(theta) dtheta` over `[-12, 12]` by the trapezoid rule.
    fn trapezoid(g: impl Fn(f64) -> f64) -> f64 {
        let n = 200_000;
        let h = 24.0 / n as f64;
        let phi = |t: f64| (-0.5 * t * t).exp();
        (0..=n)
            .map(|i| {
                let t = -12.0 + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * g(t) * phi(t)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn exact_trivial_cases() {
        let spec = PosteriorSpec::new(2.0, 2, &[]).unwrap();
        assert!((ew_predict_exact(spec, &[0.0, 0.0]).unwrap().p_plus.get() - 0.5).abs() < 1e-12);
        assert!((ew_predict_exact(spec, &[1.5, -0.3]).unwrap().p_plus.get() - 0.5).abs() < 1e-8);
        let tempered = spec.with_temper(0.5).unwrap();
        assert!(ew_predict_exact(tempered, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn exact_matches_trapezoid_oracle() {
        let prefix = [ex(&[1.0], Label::Pos)];
        let spec = PosteriorSpec::new(1.0, 1, &prefix).unwrap();
        let p = ew_predict_exact(spec, &[1.0]).unwrap();
        let reference = trapezoid(|t| sigmoid(t) * sigmoid(t)) / trapezoid(sigmoid);
        assert!(p.p_plus.get() > 0.5 && p.p_plus.get() < 1.0);
        assert!((p.p_plus.get() - reference).abs() < 1e-6, "{} vs {reference}", p.p_plus.get());
        assert!((p.p_plus.get() + p.p_minus.get() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bridged_samples_agree_with_exact() {
        let prefix = [ex(&[1.0], Label::Pos)];
        let mut ens = ChainEnsemble::from_prior(100_000, 1.0, 1, 3).unwrap();
        let spec = PosteriorSpec::new(1.0, 1, &prefix).unwrap();
        ens.advance(spec, 1.0, 1e-3, &TheoryConfig::new(100_000)).unwrap();
        let mc = ew_predict_mc(ens.samples(), &[1.0], 0.0, Mode::McTheory).unwrap();
        let exact = ew_predict_exact(spec, &[1.0]).unwrap();
        assert!((mc.p_plus.get() - exact.p_plus.get()).abs() < 0.01);
    }

    #[test]
    fn telescoping_matches_sequential_losses() {
        let data = [
            ex(&[0.8, 0.1], Label::Pos),
            ex(&[-0.3, 0.9], Label::Neg),
            ex(&[0.5, 0.5], Label::Pos),
            ex(&[0.2, -0.7], Label::Pos),
        ];
        let mut ew = ExactEw::new(3.0, 2).unwrap();
        let mut total = 0.0;
        let mut seq = vec![0.0];
        for t in 0..data.len() {
            let p = ew.predict(&data[..t], &data[t].x).unwrap();
            total += p.loss(data[t].y);
            seq.push(total);
        }
        let tele = exact_cumulative_losses(&data, 3.0, 2, &[0, 1, 2, 3, 4]).unwrap();
        for (a, b) in seq.iter().zip(&tele) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn theory_predictor_tracks_exact() {
        let data = [ex(&[0.9], Label::Pos), ex(&[-0.5], Label::Pos), ex(&[0.4], Label::Neg)];
        let sched = corollary_schedule(3, 0.1).unwrap();
        let mut mc = McTheory::new(2.0, 1, 1.0, sched, 5).unwrap();
        for t in 0..data.len() {
            let p = mc.predict(&data[..t], &data[t].x).unwrap();
            let spec = PosteriorSpec::new(2.0, 1, &data[..t]).unwrap();
            let e = ew_predict_exact(spec, &data[t].x).unwrap();
            let smoothed = (1.0 - sched.alpha) * e.p_plus.get() + 0.5 * sched.alpha;
            assert!((p.p_plus.get() - smoothed).abs() < 0.02, "round {}", t + 1);
        }
        assert_eq!(mc.ensemble().unwrap().round(), 3);
    }

    #[test]
    fn practical_predictor_is_close_to_exact() {
        let data = [ex(&[0.9, 0.2], Label::Pos), ex(&[-0.5, 0.4], Label::Pos), ex(&[0.4, -0.3], Label::Neg)];
        let cfg = crate::sampler::PracticalConfig {
            retain: 4000,
            ..Default::default()
        };
        let mut mc = McPractical::new(2.0, 2, 1.0, 0.0, cfg, 9).unwrap();
        for t in 0..data.len() {
            let p = mc.predict(&data[..t], &data[t].x).unwrap();
            let spec = PosteriorSpec::new(2.0, 2, &data[..t]).unwrap();
            let e = ew_predict_exact(spec, &data[t].x).unwrap();
            assert!((p.p_plus.get() - e.p_plus.get()).abs() < 0.03);
            assert!(mc.last_stats().is_some());
        }
    }
}
