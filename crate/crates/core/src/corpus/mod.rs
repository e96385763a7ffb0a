//! Built-in maps with their controls and expected facts.

mod claims;
pub mod example17;

use serde::Serialize;
use serde_json::{json, Value};

pub use claims::{
    claim_3_sample, verify_claim_1, verify_claim_2, verify_claim_3, ClaimReport, InequalityCheck, Relation,
};

use crate::control::{ControlFunction, RangeContract};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metric::{AbsDiff, FiniteClosedSet, Point};
use crate::multimap::{
    check_ab_contraction, check_hausdorff_contraction, d_f, embed_hausdorff, perturb_at, Branch, Domain,
    ImageExpr, MapSpec, MultivaluedMap,
};
use crate::sampling::GridSpec;
use crate::solver::{validate_preconditions, TheoremMode};

/// Controls attached to an entry. `k` is set for Hausdorff contractions.
#[derive(Clone, Debug)]
pub struct Controls {
    pub alpha: ControlFunction,
    pub beta: ControlFunction,
    pub gamma: Option<ControlFunction>,
    pub p: Option<ControlFunction>,
    pub k: Option<ControlFunction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactOrigin {
    /// Value stated with the construction.
    Stated,
    /// Value recomputed when the entry is built.
    Recomputed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedFact {
    pub name: String,
    pub value: Value,
    pub origin: FactOrigin,
}

fn fact(name: &str, value: Value, origin: FactOrigin) -> ExpectedFact {
    ExpectedFact {
        name: name.into(),
        value,
        origin,
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub map: MultivaluedMap,
    pub controls: Controls,
    /// Hypothesis sets the entry is expected to satisfy; empty for entries
    /// that break the hypotheses on purpose.
    pub modes: Vec<TheoremMode>,
    pub theorem_compatible: bool,
    pub note: Option<String>,
    pub expected: Vec<ExpectedFact>,
    /// Random starts are drawn from this interval.
    pub start_range: (f64, f64),
}

impl CorpusEntry {
    pub fn fact(&self, name: &str) -> Option<&Value> {
        self.expected.iter().find(|f| f.name == name).map(|f| &f.value)
    }

    /// Summary used by the CLI and for export.
    pub fn describe(&self) -> Value {
        json!({
            "label": self.label,
            "theorem_compatible": self.theorem_compatible,
            "modes": self.modes.iter().map(TheoremMode::name).collect::<Vec<_>>(),
            "note": self.note,
            "expected": self.expected,
            "map": self.map.to_json().ok(),
        })
    }
}

fn unit_sample(n: usize) -> Vec<Point> {
    (0..=n).map(|i| Point::scalar(i as f64 / n as f64)).collect()
}

fn constant(label: &str, contract: RangeContract, c: f64) -> ControlFunction {
    ControlFunction::constant(label, contract, c).expect("constant within contract")
}

/// Runs the declared checks of a theorem-compatible entry.
fn self_validate(entry: &CorpusEntry) -> Result<()> {
    if !entry.theorem_compatible {
        return Ok(());
    }
    let sample = unit_sample(200);
    let c = &entry.controls;
    let report = check_ab_contraction(&entry.map, &c.alpha, &c.beta, &AbsDiff, &sample)?;
    if !report.holds() {
        return Err(Error::Precondition(format!(
            "corpus entry {} fails check_ab_contraction: {}",
            entry.label,
            serde_json::to_string(&report.witnesses)?
        )));
    }
    for mode in &entry.modes {
        let pre = validate_preconditions(mode, &GridSpec::default())?;
        if !pre.holds() {
            return Err(Error::Precondition(format!(
                "corpus entry {} fails {}: {}",
                entry.label,
                mode.name(),
                serde_json::to_string(&pre.checks)?
            )));
        }
    }
    Ok(())
}

pub fn example_17() -> CorpusEntry {
    let (alpha, beta, gamma, p) = (example17::alpha(), example17::beta(), example17::gamma(), example17::p());
    let f = example17::map();
    let zeros: Vec<f64> = (0..=10_000)
        .map(|i| i as f64 * 1e-4)
        .filter(|&x| d_f(&f, &Point::scalar(x), &AbsDiff).is_ok_and(|d| d <= crate::tolerance::tau()))
        .collect();
    CorpusEntry {
        label: example17::LABEL.into(),
        modes: vec![TheoremMode::T14 {
            alpha: alpha.clone(),
            beta: beta.clone(),
            gamma: gamma.clone(),
        }],
        controls: Controls {
            alpha,
            beta,
            gamma: Some(gamma),
            p: Some(p),
            k: None,
        },
        theorem_compatible: true,
        note: None,
        expected: vec![
            fact("F(1)", json!([1.0 / 3.0, 0.75]), FactOrigin::Stated),
            fact("F(0.9)", json!([0.5]), FactOrigin::Stated),
            fact("d_F(1)", json!(0.25), FactOrigin::Stated),
            fact("d_F(1/2)", json!(1.0 / 6.0), FactOrigin::Stated),
            fact("fixed_points", json!(zeros), FactOrigin::Recomputed),
            fact("sup_alpha_beta", json!(8.0 / 9.0), FactOrigin::Recomputed),
        ],
        map: f,
        start_range: (0.0, 1.0),
    }
}

/// `f(x) = 2x/3` on `[0,1]`.
fn browder() -> CorpusEntry {
    let spec = MapSpec::Piecewise1d {
        branches: vec![Branch::new(
            Interval::closed(0.0, 1.0),
            vec![ImageExpr::Linear { a: 2.0 / 3.0, b: 0.0 }],
        )],
    };
    let alpha = constant("1", RangeContract::Alpha, 1.0);
    let beta = constant("2/3", RangeContract::Beta, 2.0 / 3.0);
    let gamma = constant("0", RangeContract::Gamma, 0.0);
    CorpusEntry {
        label: "browder".into(),
        map: MultivaluedMap::from_spec("browder", spec).expect("static branch layout"),
        modes: vec![
            TheoremMode::T14 {
                alpha: alpha.clone(),
                beta: beta.clone(),
                gamma: gamma.clone(),
            },
            // 2/3 ≤ 1 − (1/3)√t on (0, 1]
            TheoremMode::T16 {
                alpha: alpha.clone(),
                beta: beta.clone(),
                c: 1.0 / 3.0,
                p: 0.5,
                neighborhood: Interval::open_closed(0.0, 1.0),
            },
        ],
        controls: Controls {
            p: Some(crate::control::p_from_gamma(&gamma).expect("constant gamma")),
            k: Some(beta.clone().with_label("k")),
            alpha,
            beta,
            gamma: Some(gamma),
        },
        theorem_compatible: true,
        note: None,
        expected: vec![
            fact("fixed_points", json!([0.0]), FactOrigin::Stated),
            fact("k", json!(2.0 / 3.0), FactOrigin::Stated),
        ],
        start_range: (0.0, 1.0),
    }
}

/// `F(x) = {x/2, x/4 + 1/4}` on `[0,1]`, a Hausdorff contraction with
/// `k ≡ 3/4`; fixed points `0` and `1/3`.
fn hausdorff_two_point() -> Result<CorpusEntry> {
    let spec = MapSpec::Piecewise1d {
        branches: vec![Branch::new(
            Interval::closed(0.0, 1.0),
            vec![
                ImageExpr::Linear { a: 0.5, b: 0.0 },
                ImageExpr::Linear { a: 0.25, b: 0.25 },
            ],
        )],
    };
    let map = MultivaluedMap::from_spec("hausdorff-two-point", spec)?;
    let k = constant("k", RangeContract::Beta, 0.75);
    let grid = unit_sample(20);
    let pairs: Vec<(Point, Point)> = grid
        .iter()
        .flat_map(|x| grid.iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let h = check_hausdorff_contraction(&map, &k, &AbsDiff, &pairs)?;
    if !h.holds() {
        return Err(Error::Precondition(format!(
            "hausdorff-two-point rejected: {}",
            serde_json::to_string(&h.witnesses)?
        )));
    }
    let (alpha, beta) = embed_hausdorff(&k, 0.5)?;
    Ok(CorpusEntry {
        label: "hausdorff-two-point".into(),
        modes: vec![TheoremMode::T15 {
            alpha: alpha.clone(),
            beta: beta.clone(),
        }],
        controls: Controls {
            alpha,
            beta,
            gamma: None,
            p: None,
            k: Some(k),
        },
        map,
        theorem_compatible: true,
        note: None,
        expected: vec![
            fact("fixed_points", json!([0.0, 1.0 / 3.0]), FactOrigin::Recomputed),
            fact("k", json!(0.75), FactOrigin::Stated),
            fact("embedded_alpha", json!(7.0 / 6.0), FactOrigin::Recomputed),
        ],
        start_range: (0.0, 1.0),
    })
}

/// `browder` with the value at `1/2` replaced by `{0}`.
fn perturbed() -> Result<CorpusEntry> {
    let base = browder();
    let x0 = Point::scalar(0.5);
    let before = d_f(&base.map, &x0, &AbsDiff)?;
    let map = perturb_at(&base.map, &x0, FiniteClosedSet::scalars(&[0.0])?, &AbsDiff)?.with_label("perturbed");
    let after = d_f(&map, &x0, &AbsDiff)?;
    Ok(CorpusEntry {
        label: "perturbed".into(),
        map,
        controls: base.controls,
        modes: Vec::new(),
        theorem_compatible: false,
        note: Some(
            "d_G is stably positive but not lower semicontinuous at 1/2; G is not an (α,β)-mapping (x = 3/4 lands on 1/2)"
                .into(),
        ),
        expected: vec![
            fact("x0", json!(0.5), FactOrigin::Stated),
            fact("d_F(x0)", json!(before), FactOrigin::Recomputed),
            fact("d_G(x0)", json!(after), FactOrigin::Recomputed),
            fact("lsc_gap", json!(after - before), FactOrigin::Recomputed),
        ],
        start_range: (0.0, 1.0),
    })
}

/// Step length of the stall map at `x`: `0.3·(1 + e^{−|x|})`.
fn stall_step(x: f64) -> f64 {
    0.3 * (1.0 + (-x.abs()).exp())
}

/// `d_F(y)/d` for a stall step of length `d`, as a function of `d`.
fn stall_ratio(d: f64) -> f64 {
    (0.3 + (d - 0.3) * (-d).exp()) / d
}

/// Moves away from `0` by `0.3(1 + e^{−|x|})`, so `d_F` decreases to `0.3`
/// and never reaches zero. `β → 1` as `t → 0.3+`, which breaks (MT).
fn stall() -> CorpusEntry {
    let map = MultivaluedMap::new("stall", Domain::real_line(), |x| {
        let v = x.x();
        let y = if v == 0.0 { 0.0 } else { v + v.signum() * stall_step(v) };
        Ok(FiniteClosedSet::singleton(Point::new(vec![y])?))
    });
    let beta = ControlFunction::from_fn("beta_stall", RangeContract::Beta, None, |t| {
        if t <= 0.3 {
            0.5
        } else {
            (1.0 + stall_ratio(t)) / 2.0
        }
    })
    .expect("stall beta stays in [0,1)");
    CorpusEntry {
        label: "stall".into(),
        map,
        controls: Controls {
            alpha: constant("1", RangeContract::Alpha, 1.0),
            beta,
            gamma: None,
            p: None,
            k: None,
        },
        modes: Vec::new(),
        theorem_compatible: false,
        note: Some("violates (MT) on purpose: d_F(x_n) and d_n both tend to 0.3".into()),
        expected: vec![
            fact("delta_limit", json!(0.3), FactOrigin::Stated),
            fact("limit_case", json!("case_II"), FactOrigin::Stated),
        ],
        start_range: (0.5, 2.0),
    }
}

pub const POWER_RATE_C: f64 = 0.629_960_524_947_436_6; // 2^{-2/3}
pub const POWER_RATE_P: f64 = 1.0 / 3.0;

/// `u(t) = (2t)^{1/3}/2`, so that `1 − u = 1 − 2^{-2/3}·t^{1/3}`.
fn power_u(t: f64) -> f64 {
    (2.0 * t).cbrt() / 2.0
}

/// `f(x) = x − x^{3/2}/2` on `[0,1]`: `d_F(x) = x^{3/2}/2` decays like a
/// power of `n`, not geometrically.
fn power_rate() -> CorpusEntry {
    let map = MultivaluedMap::singlevalued("power-rate", Domain::interval(0.0, 1.0), |x| x - x.powf(1.5) / 2.0);
    // halfway between the exact ratio (1 − u)^{3/2} and the majorant 1 − u
    let beta = ControlFunction::from_fn("beta_power", RangeContract::Beta, None, |t| {
        if t <= 0.0 {
            return 0.0;
        }
        let u = power_u(t.min(0.5));
        ((1.0 - u).powf(1.5) + (1.0 - u)) / 2.0
    })
    .expect("power beta stays in [0,1)");
    let alpha = constant("1", RangeContract::Alpha, 1.0);
    CorpusEntry {
        label: "power-rate".into(),
        map,
        modes: vec![TheoremMode::T16 {
            alpha: alpha.clone(),
            beta: beta.clone(),
            c: POWER_RATE_C,
            p: POWER_RATE_P,
            neighborhood: Interval::open_closed(0.0, 0.5),
        }],
        controls: Controls {
            alpha,
            beta,
            gamma: None,
            p: None,
            k: None,
        },
        theorem_compatible: true,
        note: Some("α·β ≤ 1 − 2^{-2/3}·t^{1/3} near 0; β has no (MT)".into()),
        expected: vec![fact("fixed_points", json!([0.0]), FactOrigin::Stated)],
        start_range: (0.0, 1.0),
    }
}

/// All entries, validated. Labels: `example17`, `browder`,
/// `hausdorff-two-point`, `perturbed`, `stall`, `power-rate`.
pub fn standard_corpus() -> Result<Vec<CorpusEntry>> {
    let entries = vec![
        example_17(),
        browder(),
        hausdorff_two_point()?,
        perturbed()?,
        stall(),
        power_rate(),
    ];
    for e in &entries {
        self_validate(e)?;
    }
    Ok(entries)
}

/// Looks up one entry by label without validating the others.
pub fn entry(label: &str) -> Result<CorpusEntry> {
    let e = match label {
        "example17" => example_17(),
        "browder" => browder(),
        "hausdorff-two-point" => hausdorff_two_point()?,
        "perturbed" => perturbed()?,
        "stall" => stall(),
        "power-rate" => power_rate(),
        other => return Err(Error::InvalidParameter(format!("unknown corpus entry {other:?}"))),
    };
    self_validate(&e)?;
    Ok(e)
}

pub const LABELS: [&str; 6] = ["example17", "browder", "hausdorff-two-point", "perturbed", "stall", "power-rate"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::check_mt;
    use crate::sampling::DEFAULT_WINDOW;

    #[test]
    fn corpus_loads_and_validates() {
        let all = standard_corpus().unwrap();
        let labels: Vec<&str> = all.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, LABELS);
        for label in LABELS {
            assert_eq!(entry(label).unwrap().label, label);
        }
        assert!(entry("nope").is_err());
    }

    #[test]
    fn example17_facts() {
        let e = example_17();
        assert_eq!(e.fact("fixed_points").unwrap(), &json!([0.0]));
        let d = e.describe();
        assert_eq!(d["map"]["kind"], "piecewise-1d");
    }

    #[test]
    fn perturbed_values() {
        let e = perturbed().unwrap();
        assert!((e.fact("d_G(x0)").unwrap().as_f64().unwrap() - 0.5).abs() < 1e-15);
        assert!((e.fact("d_F(x0)").unwrap().as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(e.map.to_json().is_err());
    }

    #[test]
    fn stall_beta_breaks_mt_but_selection_succeeds() {
        let e = stall();
        let r = check_mt(&e.controls.beta, &GridSpec::default(), DEFAULT_WINDOW).unwrap();
        assert!(!r.holds());
        for x in [0.5, 1.0, -3.0, 10.0] {
            let rec = crate::multimap::select_step(&e.map, &Point::scalar(x), &e.controls.alpha, &e.controls.beta, &AbsDiff)
                .unwrap();
            assert!(rec.margin_b > 0.0);
            assert!((rec.d_f_y / rec.d_xy - stall_ratio(rec.d_xy)).abs() < 1e-12);
        }
    }

    #[test]
    fn power_rate_beta_brackets_the_true_ratio() {
        let e = power_rate();
        for i in 1..=1000 {
            let x = i as f64 / 1000.0;
            let rec = crate::multimap::select_step(&e.map, &Point::scalar(x), &e.controls.alpha, &e.controls.beta, &AbsDiff)
                .unwrap();
            let t = rec.d_xy;
            let beta = e.controls.beta.eval(t).unwrap();
            assert!(rec.d_f_y <= beta * t, "x = {x}");
            assert!(beta <= 1.0 - POWER_RATE_C * t.powf(POWER_RATE_P) + 1e-15);
        }
        assert!((POWER_RATE_C - 2.0_f64.powf(-2.0 / 3.0)).abs() < 1e-15);
    }
}
