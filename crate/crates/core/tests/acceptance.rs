//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line
//! and then asserts, so a single run shows the whole table.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

use std::time::{Duration, Instant};

use contractum::control::{
    alpha_bound_from, check_bounded, check_stably_positive, gamma_poly_family, lemma21_certificate, ControlFunction,
    Piece, RangeContract,
};
use contractum::corpus::{self, example17, verify_claim_1, verify_claim_2, verify_claim_3, ClaimReport};
use contractum::interval::Interval;
use contractum::metric::{hausdorff, AbsDiff, Euclidean, FiniteClosedSet, Metric, Point};
use contractum::multimap::{
    check_ab_contraction, check_hausdorff_contraction, d_f, embed_hausdorff, lower_semicontinuity_gap,
};
use contractum::sampling::{GridSpec, DEFAULT_WINDOW};
use contractum::solver::{iterate, trace_invariants, IterationTrace, StopRule};
use contractum::summability::bound_check;
use contractum::tolerance::{tau, MU};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

fn verdict(n: u32, title: &str, ok: bool, detail: String) {
    println!("criterion {n}: {} {title} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn scalar(x: f64) -> Point {
    Point::scalar(x)
}

/// Every exact-valued line of a claim must carry its rational and hold.
fn exact_lines_hold(report: &ClaimReport, labels: &[&str]) -> Result<(), String> {
    for label in labels {
        let line = report
            .inequality(label)
            .ok_or_else(|| format!("missing line {label:?}"))?;
        if line.exact.is_none() || !line.holds {
            return Err(format!("{label:?}: {line:?}"));
        }
    }
    Ok(())
}

#[test]
fn criterion_1_forced_inequalities() {
    let (r, t) = timed(verify_claim_1);
    let r = r.expect("claim 1 runs");
    let exact = exact_lines_hold(
        &r,
        &["y=3/4: forced β(1/4) ≥ 1 contradicts β < 1", "y=1/3: forced α(2/3) ≥ 8/3"],
    );
    let ok = r.holds() && exact.is_ok() && t < Duration::from_secs(1);
    verdict(1, "forced β(1/4) ≥ 1 and α(2/3) ≥ 8/3", ok, format!("{exact:?}, {t:?}"));
}

#[test]
fn criterion_2_empty_feasible_interval() {
    let (r, t) = timed(verify_claim_2);
    let r = r.expect("claim 2 runs");
    let exact = exact_lines_hold(&r, &["forced β(1/6) ≥ 2/3", "d_F(y)", "a·β(1/6) < 1 ⇒ a < 3/2", "x=1, y=1/3: a ≥ 8/3"]);
    let empty = r.details["feasible_interval"].is_null()
        && r.inequality("(1, 3/2) ∩ [8/3, ∞) = ∅").is_some_and(|c| c.holds);
    let ok = r.holds() && exact.is_ok() && empty && t < Duration::from_secs(1);
    verdict(2, "β(1/6) ≥ 2/3, d_F(y) = 1/9, a < 3/2 vs a ≥ 8/3", ok, format!("{exact:?}, empty = {empty}, {t:?}"));
}

#[test]
fn criterion_3_contraction_and_per_branch_inequalities() {
    let (r, t) = timed(verify_claim_3);
    let r = r.expect("claim 3 runs");
    // equality lines are exactly the ones labelled so; everything else strict
    let mut bad = Vec::new();
    for line in &r.inequalities {
        let equality = line.label.contains("equality");
        let strict_ok = line.margin > 0.0;
        let eq_ok = line.margin.abs() <= tau();
        let counter = line.label.contains("violations") || line.label.contains("failed hypotheses");
        let formula = line.label.contains("selected y") || line.label.contains("matches");
        let fine = line.holds && (counter || formula || if equality { eq_ok } else { strict_ok });
        if !fine {
            bad.push(line.label.clone());
        }
    }
    let x1a = r.inequality("x=1 (A): d(x,y) ≤ α(2/3)·d_F(1), equality").is_some_and(|c| c.margin.abs() <= tau());
    let ok = r.holds() && bad.is_empty() && x1a && t < Duration::from_secs(5);
    verdict(3, "contraction on the 1e-3 grid, T14, branch inequalities", ok, format!("bad = {bad:?}, {t:?}"));
}

fn starts(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

#[test]
fn criterion_4_convergence_from_seeded_starts() {
    let f = example17::map();
    let (alpha, beta) = (example17::alpha(), example17::beta());
    let (_, c_sup) = check_bounded(&alpha, &GridSpec::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_steps = 0;
    let mut worst_limit: f64 = 0.0;
    let mut failures = Vec::new();
    for x0 in starts(&mut rng, 100, 0.0, 1.0) {
        let trace = iterate(&f, &scalar(x0), &alpha, &beta, &AbsDiff, StopRule::default()).unwrap();
        worst_steps = worst_steps.max(trace.len());
        worst_limit = worst_limit.max(trace.final_point.x().abs());
        let ok = trace.converged()
            && trace.final_d_f <= 1e-9
            && trace.len() <= 120
            && trace.final_point.x().abs() <= 1e-8
            && trace_invariants(&trace, c_sup).holds();
        if !ok {
            failures.push(x0);
        }
    }
    verdict(
        4,
        "100 starts converge to 0 within 120 steps",
        failures.is_empty(),
        format!("max steps {worst_steps}, max |x*| {worst_limit:.2e}, failures {failures:?}"),
    );
}

/// Recomputes the decrease and sandwich bounds straight from the records.
fn sandwich_violations(trace: &IterationTrace, c: f64) -> Vec<usize> {
    let d_f = trace.d_f_values();
    let mut bad = Vec::new();
    for (n, s) in trace.steps.iter().enumerate() {
        let decreases = d_f[n] <= MU || d_f[n + 1] < d_f[n];
        let lower = d_f[n] <= s.d_xy + tau();
        let upper = s.d_xy <= c * d_f[n] + tau();
        if !(decreases && lower && upper) {
            bad.push(n);
        }
    }
    bad
}

#[test]
fn criterion_5_decrease_and_sandwich_on_compatible_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut summary = Vec::new();
    let mut ok = true;
    for e in corpus::standard_corpus().unwrap().into_iter().filter(|e| e.theorem_compatible) {
        let (_, c_sup) = check_bounded(&e.controls.alpha, &GridSpec::default()).unwrap();
        let mut steps = 0;
        let mut bad = 0;
        for x0 in starts(&mut rng, 20, e.start_range.0, e.start_range.1) {
            let trace =
                iterate(&e.map, &scalar(x0), &e.controls.alpha, &e.controls.beta, &AbsDiff, StopRule::default()).unwrap();
            steps += trace.len();
            bad += sandwich_violations(&trace, c_sup).len();
        }
        ok &= bad == 0;
        summary.push(format!("{}: {steps} steps, {bad} bad", e.label));
    }
    verdict(5, "d_F decreases and d_F ≤ d_n ≤ C·d_F", ok, summary.join("; "));
}

/// Nonincreasing step `β` with (MT): `0.6` near zero, `0.4` beyond `1/2`.
fn piecewise_mt_beta() -> ControlFunction {
    ControlFunction::piecewise(
        "beta_steps",
        RangeContract::Beta,
        vec![
            Piece::constant(Interval::closed(0.0, 0.5), 0.6),
            Piece::constant(Interval::above(0.5), 0.4),
        ],
    )
    .unwrap()
}

#[test]
fn criterion_6_product_majorant_for_three_pairs() {
    let grid = GridSpec::default();
    let id = ControlFunction::from_fn("s", RangeContract::Gamma, None, |s| s).unwrap();
    let half = ControlFunction::constant("1/2", RangeContract::Beta, 0.5).unwrap();
    let mt_beta = piecewise_mt_beta();
    let poly = gamma_poly_family(2).unwrap();
    let pairs = [
        ("example", example17::alpha(), example17::beta(), example17::gamma()),
        ("half/identity", alpha_bound_from(&half, &id).unwrap(), half.clone(), id.clone()),
        ("steps/poly2", alpha_bound_from(&mt_beta, &poly).unwrap(), mt_beta.clone(), poly.clone()),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, alpha, beta, gamma) in &pairs {
        let holds = lemma21_certificate(alpha, beta, gamma, &grid, DEFAULT_WINDOW).is_ok_and(|r| r.holds());
        // independent pointwise recomputation of the majorant
        let pointwise = grid.points().into_iter().filter(|&t| beta.domain().contains(t)).all(|t| {
            let (a, b) = (alpha.eval(t).unwrap(), beta.eval(t).unwrap());
            let s = 1.0 - b;
            // p(s) = s − (1 − s)γ(s)
            let p = s - (1.0 - s) * gamma.eval(s).unwrap();
            a * b <= 1.0 - p + tau()
        });
        ok &= holds && pointwise;
        lines.push(format!("{name}: {holds}"));
    }
    verdict(6, "αβ ≤ 1 − p(1−β) and product (MT)", ok, lines.join(", "));
}

/// `t_{n+1} = (1 − C t_n^p) t_n` and the closed-form majorant, computed
/// without the library.
fn oracle_power_sequence(c: f64, p: f64, t0: f64, n: usize) -> (bool, f64) {
    let mut t = t0;
    let mut min_increment = f64::INFINITY;
    for k in 1..=n {
        let next = (1.0 - c * t.powf(p)) * t;
        if next <= 0.0 {
            break;
        }
        min_increment = min_increment.min(next.powf(-p) - t.powf(-p));
        t = next;
        let bound = (t0.powf(-p) + k as f64 * p * c).powf(-1.0 / p);
        if t > bound + tau() {
            return (false, min_increment);
        }
    }
    (true, min_increment)
}

#[test]
fn criterion_7_power_majorant_bound_grid() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut cases = 0;
    for c in [0.1_f64, 0.5, 1.0] {
        for p in [0.25, 0.5, 0.75] {
            let edge = c.powf(-1.0 / p);
            for t0 in [0.1, 0.5, 0.9 * edge] {
                cases += 1;
                let (report, _) = bound_check(c, p, t0, 10_000).unwrap();
                let (oracle, min_inc) = oracle_power_sequence(c, p, t0, 10_000);
                if !(report.holds() && oracle && min_inc > p * c - 1e-9) {
                    bad.push((c, p, t0));
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        7,
        "t_n ≤ (t0^{-p} + npC)^{-1/p} on the 3×3×3 grid",
        bad.is_empty() && cases == 27 && t < Duration::from_secs(10),
        format!("{cases} cases, bad {bad:?}, {t:?}"),
    );
}

#[test]
fn criterion_8_hausdorff_embedding() {
    let e = corpus::entry("hausdorff-two-point").unwrap();
    let k = e.controls.k.clone().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let pairs: Vec<(Point, Point)> = (0..500)
        .map(|_| (scalar(rng.gen_range(0.0..=1.0)), scalar(rng.gen_range(0.0..=1.0))))
        .collect();
    let h = check_hausdorff_contraction(&e.map, &k, &AbsDiff, &pairs).unwrap();
    let (alpha, beta) = embed_hausdorff(&k, 0.5).unwrap();
    let sample: Vec<Point> = pairs.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
    let ab = check_ab_contraction(&e.map, &alpha, &beta, &AbsDiff, &sample).unwrap();
    verdict(
        8,
        "Hausdorff k = 3/4 and the embedded (α, β) on 500 pairs",
        h.holds() && ab.holds(),
        format!("hausdorff {:?}, ab {:?}", h.verdict, ab.verdict),
    );
}

fn naive_hausdorff(a: &[Point], b: &[Point], m: &dyn Metric) -> f64 {
    let directed = |from: &[Point], to: &[Point]| {
        let mut worst = 0.0_f64;
        for x in from {
            let mut best = f64::INFINITY;
            for y in to {
                best = best.min(m.distance(x, y));
            }
            worst = worst.max(best);
        }
        worst
    };
    directed(a, b).max(directed(b, a))
}

fn random_set(rng: &mut ChaCha8Rng, dim: usize) -> FiniteClosedSet {
    let n = rng.gen_range(1..=50);
    let pts = (0..n)
        .map(|_| Point::new((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect()).unwrap())
        .collect();
    FiniteClosedSet::new(pts).unwrap()
}

#[test]
fn criterion_9_hausdorff_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut mismatches = 0;
    for i in 0..1000 {
        let dim = 1 + i % 3;
        let (a, b) = (random_set(&mut rng, dim), random_set(&mut rng, dim));
        let m: &dyn Metric = if dim == 1 { &AbsDiff } else { &Euclidean };
        if hausdorff(&a, &b, m).unwrap() != naive_hausdorff(a.points(), b.points(), m) {
            mismatches += 1;
        }
    }
    verdict(9, "hausdorff equals the naive oracle on 1000 pairs", mismatches == 0, format!("{mismatches} mismatches"));
}

#[test]
fn criterion_10_stably_positive_but_not_lsc() {
    let e = corpus::entry("perturbed").unwrap();
    let g = e.map.clone();
    let h = move |x: &Point| d_f(&g, x, &AbsDiff);
    let grid: Vec<Point> = (0..=1000).map(|i| scalar(i as f64 / 1000.0)).collect();
    let stable = check_stably_positive(&h, &grid, 1e-2, &AbsDiff).unwrap();
    let x0 = scalar(0.5);
    let mut worst_gap = f64::INFINITY;
    for side in [1.0, -1.0] {
        let approach: Vec<Point> = (1..=30).map(|k| scalar(0.5 + side * 0.5_f64.powi(k + 2))).collect();
        worst_gap = worst_gap.min(lower_semicontinuity_gap(&h, &x0, &approach).unwrap());
    }
    verdict(
        10,
        "d_G stably positive with r = 1e-2, lsc gap at 1/2 above 0.3",
        stable.holds() && worst_gap > 0.3,
        format!("stable {:?}, gap {worst_gap:.6}", stable.verdict),
    );
}
