//! Structural invariants under arbitrary inputs.

use std::f64::consts::PI;

use diminishing::distributions::DfForm;
use diminishing::interval::{IntervalState, Sign, ThinnedIntervalState};
use diminishing::polygon::{pentagon_residual, run_polygon, PolygonMonitor, PolygonState};
use diminishing::simplex::{to_barycentric, SimplexFrame, SimplexState, SimplexThinned};
use diminishing::stats::{envelope_check, ks_stat, moment_estimate};
use diminishing::RngStream;
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    0.0..1.0f64
}

proptest! {
    #[test]
    fn df_form_quantile_inverts_cdf(c in 0.0..=1.0f64, delta in 0.2..5.0f64, x in unit()) {
        let law = DfForm::new(c, delta).unwrap();
        let u = law.cdf(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&u));
        let back = law.quantile(u);
        prop_assert!((law.cdf(back).unwrap() - u).abs() < 1e-9);
    }

    #[test]
    fn df_form_cdf_is_monotone(c in 0.0..=1.0f64, delta in 0.2..5.0f64, a in unit(), b in unit()) {
        let law = DfForm::new(c, delta).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(law.cdf(lo).unwrap() <= law.cdf(hi).unwrap());
    }

    #[test]
    fn interval_steps_are_nested(xs in prop::collection::vec(unit(), 1..200)) {
        let mut s = IntervalState::new(DfForm::uniform());
        for x in xs {
            let (lo, hi) = s.bounds();
            s.step_with(x);
            let (lo2, hi2) = s.bounds();
            prop_assert!(lo2 >= lo && hi2 <= hi);
            prop_assert!(s.radius() >= 0.5);
        }
    }

    #[test]
    fn thinned_interval_stays_in_limit_window(moves in prop::collection::vec((any::<bool>(), unit()), 1..200)) {
        let mut s = ThinnedIntervalState::new(0.3, 2.0).unwrap();
        for (plus, v) in moves {
            let before = s.excess;
            s.step_with(if plus { Sign::Plus } else { Sign::Minus }, v);
            prop_assert!(s.excess <= before);
            prop_assert!(s.center.abs() + s.excess <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn simplex_offsets_only_grow(d in 1usize..5, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let mut s = SimplexState::new(d).unwrap();
        let rho = s.rho();
        let mut w = Vec::new();
        for _ in 0..300 {
            let before = s.clone();
            s.step(&mut rng, &mut w);
            prop_assert!(s.offsets().iter().zip(before.offsets()).all(|(a, b)| a >= b));
            prop_assert!(s.height() >= rho - 1e-12 && s.height() <= 2.0 * rho + 1e-12);
            let lambda = s.center_barycentric();
            prop_assert!((lambda.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(lambda.iter().all(|&l| l >= -1e-12));
        }
    }

    #[test]
    fn thinned_simplex_stays_normalized(d in 1usize..5, moves in prop::collection::vec((0usize..5, unit()), 1..100)) {
        let mut s = SimplexThinned::new(d).unwrap();
        for (xi, h) in moves {
            s.step_with(xi % (d + 1), h).unwrap();
            prop_assert!((s.lambda.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(s.lambda.iter().all(|&l| l >= 0.0));
        }
    }

    #[test]
    fn barycentric_round_trip(d in 1usize..5, raw in prop::collection::vec(0.001..1.0f64, 5)) {
        let frame = SimplexFrame::new(d).unwrap();
        let total: f64 = raw[..=d].iter().sum();
        let lambda: Vec<f64> = raw[..=d].iter().map(|x| x / total).collect();
        let mut p = vec![0.0; d];
        for (l, e) in lambda.iter().zip(frame.dirs()) {
            p.iter_mut().zip(e).for_each(|(pi, ei)| *pi += l * ei / (d + 1) as f64);
        }
        let back = to_barycentric(&p, d).unwrap();
        for (a, b) in back.iter().zip(&lambda) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_trajectories_stay_valid(k in 5usize..10, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 1);
        let mut mon = PolygonMonitor::new();
        run_polygon(k, 400, &mut rng, &mut mon).unwrap();
        prop_assert!(mon.log.is_clean(), "{:?}", mon.log.messages);
        prop_assert!(mon.min_incircle >= 0.1);
        prop_assert!(mon.min_area >= PI / 100.0 && mon.max_area <= PI);
        if k == 5 {
            prop_assert!(mon.max_angle_error <= 1e-9);
            prop_assert!(mon.max_residual <= 1e-9);
        }
    }

    #[test]
    fn points_outside_change_regions_change_nothing(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 2);
        let mut s = PolygonState::new(5).unwrap();
        for _ in 0..50 {
            s.step(&mut rng).unwrap();
        }
        let rho = s.rho();
        let p = s.sample_point(&mut rng).unwrap();
        let in_region = s.dirs().iter().zip(s.offsets()).any(|(d, o)| p[0] * d[0] + p[1] * d[1] >= o + rho);
        let before = s.clone();
        let changed = s.step_with_point(p).unwrap();
        prop_assert_eq!(changed, in_region);
        if !in_region {
            prop_assert_eq!(s, before);
        }
    }

    #[test]
    fn regular_pentagons_have_zero_residual(m in 0.1..3.0f64) {
        prop_assert!(pentagon_residual(&[m; 5]).abs() < 1e-12);
    }

    #[test]
    fn ks_is_a_permutation_invariant_distance(mut xs in prop::collection::vec(unit(), 1..100), seed in any::<u64>()) {
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        let d = ks_stat(&xs, uniform).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let mut rng = RngStream::new(seed, 3);
        for i in (1..xs.len()).rev() {
            let j = (rng.uniform() * (i + 1) as f64) as usize;
            xs.swap(i, j.min(i));
        }
        prop_assert_eq!(ks_stat(&xs, uniform).unwrap(), d);
    }

    #[test]
    fn moments_scale_homogeneously(xs in prop::collection::vec(-10.0..10.0f64, 1..50), c in 0.1..5.0f64, alpha in 0.5..3.0f64) {
        let base = moment_estimate(&xs, alpha).unwrap().mean;
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let m = moment_estimate(&scaled, alpha).unwrap().mean;
        prop_assert!((m - c.powf(alpha) * base).abs() <= 1e-9 * (1.0 + m.abs()));
    }

    #[test]
    fn trivial_envelope_always_passes(xs in prop::collection::vec(-5.0..5.0f64, 1..50), x in -5.0..5.0f64) {
        prop_assert!(envelope_check(&xs, |_| 0.0, |_| 1.0, &[x], 0.0).unwrap().passed());
    }
}
