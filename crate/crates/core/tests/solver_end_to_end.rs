//! Iteration over the corpus: random starts, the stall map, and the
//! power-rate bridge between traces and the summability majorant.

use contractum::control::check_stably_positive;
use contractum::corpus::{self, POWER_RATE_C, POWER_RATE_P};
use contractum::metric::{AbsDiff, Point};
use contractum::multimap::d_f;
use contractum::sampling::GridSpec;
use contractum::solver::{
    classify_limit_case, iterate, validate_preconditions, verify_fixed_point, LimitCase, StopReason, StopRule,
};
use contractum::tolerance::tau;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_starts_reach_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let stop = StopRule {
        eps_fp: 1e-9,
        max_steps: 10_000,
    };
    let mut exercised = 0;
    for e in corpus::standard_corpus().unwrap() {
        let preconditions = e
            .modes
            .iter()
            .any(|m| validate_preconditions(m, &GridSpec::default()).unwrap().holds());
        let map = e.map.clone();
        let sample: Vec<Point> = (0..=200).map(|i| Point::scalar(i as f64 / 200.0)).collect();
        let stable = check_stably_positive(|x| d_f(&map, x, &AbsDiff), &sample, 1e-2, &AbsDiff)
            .unwrap()
            .holds();
        if !(preconditions && stable) {
            continue;
        }
        exercised += 1;
        for _ in 0..20 {
            let x0 = Point::scalar(rng.gen_range(e.start_range.0..=e.start_range.1));
            let t = iterate(&e.map, &x0, &e.controls.alpha, &e.controls.beta, &AbsDiff, stop).unwrap();
            assert!(
                verify_fixed_point(&e.map, &t.final_point, &AbsDiff, stop.eps_fp).unwrap(),
                "{} from {x0:?}: {:?}",
                e.label,
                t.stop_reason
            );
        }
    }
    assert_eq!(exercised, 4);
}

#[test]
fn stall_map_is_case_two() {
    let e = corpus::entry("stall").unwrap();
    let stop = StopRule {
        eps_fp: 1e-9,
        max_steps: 400,
    };
    for x0 in [0.5, 1.0, 2.0, -1.5] {
        let t = iterate(&e.map, &Point::scalar(x0), &e.controls.alpha, &e.controls.beta, &AbsDiff, stop).unwrap();
        assert_ne!(t.stop_reason, StopReason::Converged);
        assert_eq!(classify_limit_case(&t).unwrap(), LimitCase::CaseII, "x0 = {x0}");
        assert!((t.final_d_f - 0.3).abs() < 1e-3);
    }
}

#[test]
fn power_rate_trace_follows_the_majorant() {
    let e = corpus::entry("power-rate").unwrap();
    let phi = |t: f64| 1.0 - POWER_RATE_C * t.powf(POWER_RATE_P);
    for x0 in [0.1, 0.5, 1.0] {
        let t = iterate(&e.map, &Point::scalar(x0), &e.controls.alpha, &e.controls.beta, &AbsDiff, StopRule::default())
            .unwrap();
        assert!(t.converged());
        let d = t.d_f_values();
        for w in d.windows(2) {
            assert!(w[1] <= phi(w[0]) * w[0] + tau(), "{} > φ({0})·{0}", w[1]);
        }
    }
}
