//! The three claims about the `example17` map: it is not a
//! `(2 − β, β)`-contraction, not an `(a, β)`-contraction for constant `a`,
//! and it is an `(α, β)`-contraction for the stated piecewise controls.

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::example17::{self, r, to_f64};
use crate::control::{ControlFunction, RangeContract};
use crate::error::Result;
use crate::metric::{dist_point_set, AbsDiff, Point};
use crate::multimap::{check_ab_contraction, check_ab_mapping, d_f, select_step, MultivaluedMap};
use crate::report::Verdict;
use crate::sampling::{sorted_unique, GridSpec};
use crate::solver::{validate_preconditions, TheoremMode};
use crate::tolerance::{tau, MU};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "≤",
            Relation::Lt => "<",
            Relation::Ge => "≥",
            Relation::Eq => "=",
        })
    }
}

/// One checked inequality `lhs rel rhs`. For a family over a grid, `lhs`,
/// `rhs` and `margin` are taken at the point of smallest margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub label: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    /// `rhs − lhs` for `≤`/`<`, `lhs − rhs` for `≥`, `−|lhs − rhs|` for `=`.
    pub margin: f64,
    pub holds: bool,
    /// Rational value the computed quantity is compared against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_at: Option<f64>,
    pub points: usize,
}

impl InequalityCheck {
    pub fn new(label: impl Into<String>, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let margin = match relation {
            Relation::Le | Relation::Lt => rhs - lhs,
            Relation::Ge => lhs - rhs,
            Relation::Eq => -(lhs - rhs).abs(),
        };
        let holds = match relation {
            Relation::Lt => margin > MU,
            Relation::Le | Relation::Ge | Relation::Eq => margin >= -tau(),
        };
        Self {
            label: label.into(),
            lhs,
            relation,
            rhs,
            margin,
            holds,
            exact: None,
            worst_at: None,
            points: 1,
        }
    }

    /// Requires the checked quantity `lhs` to equal `q` within `τ`.
    pub fn with_exact(mut self, q: Rational64) -> Self {
        self.holds &= (self.lhs - to_f64(q)).abs() <= tau();
        self.exact = Some(q.to_string());
        self
    }

    /// Folds a family of checks into its worst member.
    fn family(label: &str, items: impl IntoIterator<Item = (f64, InequalityCheck)>) -> Self {
        let mut worst: Option<InequalityCheck> = None;
        let mut all = true;
        let mut count = 0;
        for (x, c) in items {
            count += 1;
            all &= c.holds;
            if worst.as_ref().is_none_or(|w| c.margin < w.margin) {
                worst = Some(InequalityCheck { worst_at: Some(x), ..c });
            }
        }
        let mut w = worst.unwrap_or_else(|| InequalityCheck {
            holds: false,
            ..InequalityCheck::new(label, f64::NAN, Relation::Le, f64::NAN)
        });
        w.label = label.into();
        w.holds = all && count > 0;
        w.points = count;
        w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: String,
    pub statement: String,
    pub verdict: Verdict,
    pub inequalities: Vec<InequalityCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub details: serde_json::Value,
}

impl ClaimReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    pub fn inequality(&self, label: &str) -> Option<&InequalityCheck> {
        self.inequalities.iter().find(|c| c.label == label)
    }

    fn new(claim: &str, statement: &str, inequalities: Vec<InequalityCheck>, details: serde_json::Value) -> Self {
        let verdict = Verdict::from_holds(inequalities.iter().all(|c| c.holds));
        Self {
            claim: claim.into(),
            statement: statement.into(),
            verdict,
            inequalities,
            notes: Vec::new(),
            details,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: {} [{}]\n",
            self.claim,
            self.statement,
            if self.holds() { "holds" } else { "violated" }
        );
        for c in &self.inequalities {
            out.push_str(&format!(
                "  {} {}: {:.12} {} {:.12} (margin {:.3e}{}{})\n",
                if c.holds { "ok  " } else { "FAIL" },
                c.label,
                c.lhs,
                c.relation,
                c.rhs,
                c.margin,
                c.exact.as_ref().map(|q| format!(", exact {q}")).unwrap_or_default(),
                if c.points > 1 { format!(", {} points", c.points) } else { String::new() },
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

const M: AbsDiff = AbsDiff;

fn pt(x: f64) -> Point {
    Point::scalar(x)
}

fn df(f: &MultivaluedMap, x: f64) -> Result<f64> {
    d_f(f, &pt(x), &M)
}

/// Distance from `x` to `y` and `d_F(y)` for the candidate `y ∈ F(x)`.
fn step_at(f: &MultivaluedMap, x: f64, y: f64) -> Result<(f64, f64)> {
    let image = f.eval(&pt(x))?;
    assert!(image.contains(&pt(y), &M), "{y} ∉ F({x})");
    Ok(((x - y).abs(), dist_point_set(&pt(y), &f.eval(&pt(y))?, &M)?))
}

/// At `x = 1` the branch `y = 3/4` forces `β(1/4) ≥ 1` and the branch
/// `y = 1/3` forces `α(2/3) ≥ 8/3 > 2 ≥ 2 − β`.
pub fn verify_claim_1() -> Result<ClaimReport> {
    let f = example17::map();
    let image = f.eval(&pt(1.0))?;
    let d_f_x = df(&f, 1.0)?;
    let (d_hi, d_f_hi) = step_at(&f, 1.0, 0.75)?;
    let (d_lo, _) = step_at(&f, 1.0, 1.0 / 3.0)?;
    let forced_beta = d_f_hi / d_hi;
    let forced_alpha = d_lo / d_f_x;
    let checks = vec![
        InequalityCheck::new("|F(1)|", image.len() as f64, Relation::Eq, 2.0),
        InequalityCheck::new("d_F(1)", d_f_x, Relation::Eq, 0.25).with_exact(r(1, 4)),
        InequalityCheck::new("y=3/4: d(x,y)", d_hi, Relation::Eq, 0.25).with_exact(r(1, 4)),
        InequalityCheck::new("y=3/4: d_F(y)", d_f_hi, Relation::Eq, 0.25).with_exact(r(1, 4)),
        InequalityCheck::new("y=3/4: forced β(1/4) ≥ 1 contradicts β < 1", forced_beta, Relation::Ge, 1.0)
            .with_exact(r(1, 1)),
        InequalityCheck::new("y=1/3: d(x,y)", d_lo, Relation::Eq, 2.0 / 3.0).with_exact(r(2, 3)),
        InequalityCheck::new("y=1/3: forced α(2/3) ≥ 8/3", forced_alpha, Relation::Eq, 8.0 / 3.0).with_exact(r(8, 3)),
        InequalityCheck::new("y=1/3: 2 − β < 2 < forced α(2/3)", 2.0, Relation::Lt, forced_alpha),
    ];
    let details = json!({
        "x": 1.0,
        "image": image,
        "forced_beta_quarter": forced_beta,
        "forced_alpha_two_thirds": forced_alpha,
        "admissible_pair_exists": false,
    });
    Ok(ClaimReport::new(
        "claim_1",
        "F is not a (2−β, β)-contraction",
        checks,
        details,
    ))
}

/// `x = 1/2` forces `β(1/6) ≥ 2/3`, so `a·β(1/6) < 1` gives `a < 3/2`,
/// while `x = 1` needs `a ≥ 8/3`.
pub fn verify_claim_2() -> Result<ClaimReport> {
    let f = example17::map();
    let image = f.eval(&pt(0.5))?;
    let y = image.points()[0].x();
    let (d, d_f_y) = step_at(&f, 0.5, y)?;
    let forced_beta = d_f_y / d;
    let a_upper = 1.0 / forced_beta;
    let (d_lo, _) = step_at(&f, 1.0, 1.0 / 3.0)?;
    let a_lower = d_lo / df(&f, 1.0)?;
    let (d_hi, d_f_hi) = step_at(&f, 1.0, 0.75)?;

    // a constant α = a admits no selection at x = 1 for any a < 8/3
    let grid: Vec<Point> = (0..=1000).map(|i| pt(i as f64 * 1e-3)).collect();
    let beta = ControlFunction::constant("2/3", RangeContract::Beta, 2.0 / 3.0)?;
    let mut sweep = Vec::new();
    let mut sweep_checks = Vec::new();
    for a in [1.1, 1.2, 1.3, 1.4] {
        let alpha = ControlFunction::constant(format!("{a}"), RangeContract::Alpha, a)?;
        let report = check_ab_mapping(&f, &alpha, &beta, &M, &grid)?;
        let fails_at_one = report.witnesses.iter().any(|w| w.input == vec![1.0]);
        sweep.push(json!({ "a": a, "verdict": report.verdict, "violations": report.violations }));
        let mut c = InequalityCheck::new(format!("a = {a}: sampled violations"), report.violations as f64, Relation::Ge, 1.0);
        c.holds &= fails_at_one;
        sweep_checks.push(c);
    }

    let checks: Vec<InequalityCheck> = vec![
        InequalityCheck::new("|F(1/2)|", image.len() as f64, Relation::Eq, 1.0),
        InequalityCheck::new("y = 1/3", y, Relation::Eq, 1.0 / 3.0).with_exact(r(1, 3)),
        InequalityCheck::new("d(x,y) = d_F(1/2)", d, Relation::Eq, df(&f, 0.5)?).with_exact(r(1, 6)),
        InequalityCheck::new("d_F(y)", d_f_y, Relation::Eq, 1.0 / 9.0).with_exact(r(1, 9)),
        InequalityCheck::new("forced β(1/6) ≥ 2/3", forced_beta, Relation::Eq, 2.0 / 3.0).with_exact(r(2, 3)),
        InequalityCheck::new("a·β(1/6) < 1 ⇒ a < 3/2", a_upper, Relation::Eq, 1.5).with_exact(r(3, 2)),
        InequalityCheck::new("x=1, y=3/4: forced β(1/4) ≥ 1", d_f_hi / d_hi, Relation::Ge, 1.0).with_exact(r(1, 1)),
        InequalityCheck::new("x=1, y=1/3: a ≥ 8/3", a_lower, Relation::Eq, 8.0 / 3.0).with_exact(r(8, 3)),
        InequalityCheck::new("(1, 3/2) ∩ [8/3, ∞) = ∅", a_upper, Relation::Lt, a_lower),
    ]
    .into_iter()
    .chain(sweep_checks)
    .collect();
    let details = json!({
        "a_upper_exclusive": a_upper,
        "a_lower": a_lower,
        "feasible_interval": null,
        "sweep": sweep,
    });
    Ok(ClaimReport::new(
        "claim_2",
        "F is not an (a, β)-contraction for constant a > 1",
        checks,
        details,
    ))
}

/// Sample for the contraction check: the `10⁻³` grid of `[0,1]`, the
/// breakpoints, and a `10⁻⁵` grid of `(3/4, 5/6]` where `d(x,y) ∈ (1/4, 1/3]`.
pub fn claim_3_sample() -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-3).collect();
    xs.extend(example17::breakpoints());
    let (lo, hi): (f64, f64) = (0.75, 5.0 / 6.0);
    let n = ((hi - lo) / 1e-5).round() as usize;
    xs.extend((1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64));
    xs.push(hi + 1e-5);
    sorted_unique(xs)
}

/// The controls `α`, `β`, `γ`, `p` make F an `(α, β)`-contraction satisfying
/// the assumptions checked by [`validate_preconditions`] in mode T14.
pub fn verify_claim_3() -> Result<ClaimReport> {
    let f = example17::map();
    let (alpha, beta, gamma) = (example17::alpha(), example17::beta(), example17::gamma());
    let xs = claim_3_sample();
    let sample: Vec<Point> = xs.iter().map(|&x| pt(x)).collect();
    let contraction = check_ab_contraction(&f, &alpha, &beta, &M, &sample)?;
    let pre = validate_preconditions(
        &TheoremMode::T14 {
            alpha: alpha.clone(),
            beta: beta.clone(),
            gamma,
        },
        &GridSpec::default(),
    )?;

    let mut checks = vec![
        InequalityCheck::new("check_ab_contraction violations", contraction.violations as f64, Relation::Eq, 0.0),
        InequalityCheck::new("T14 failed hypotheses", pre.checks.iter().filter(|c| !c.verdict.holds()).count() as f64, Relation::Eq, 0.0),
    ];

    // x = 1
    let rec = select_step(&f, &pt(1.0), &alpha, &beta, &M)?;
    let d = rec.d_xy;
    checks.push(InequalityCheck::new("x=1: selected y", rec.y.x(), Relation::Eq, 1.0 / 3.0).with_exact(r(1, 3)));
    checks.push(
        InequalityCheck::new("x=1 (A): d(x,y) ≤ α(2/3)·d_F(1), equality", d, Relation::Eq, alpha.eval(d)? * rec.d_f_x)
            .with_exact(r(2, 3)),
    );
    checks.push(
        InequalityCheck::new("x=1 (B): d_F(1/3) ≤ β(2/3)·2/3", rec.d_f_y, Relation::Lt, beta.eval(d)? * d)
            .with_exact(r(1, 9)),
    );

    // x ∈ (0, 1): y = F(x) is forced and d(x,y) = d_F(x)
    let interior: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect();
    let mut forced = Vec::new();
    let mut cond_a = Vec::new();
    let mut lower = Vec::new();
    let mut middle = Vec::new();
    let mut upper = Vec::new();
    for &x in &interior {
        let rec = select_step(&f, &pt(x), &alpha, &beta, &M)?;
        let (y, d) = (rec.y.x(), rec.d_xy);
        let y_formula = if x < 0.75 { 2.0 * x / 3.0 } else { 0.5 };
        forced.push((x, InequalityCheck::new("", y, Relation::Eq, y_formula)));
        cond_a.push((x, InequalityCheck::new("", d, Relation::Lt, alpha.eval(d)? * rec.d_f_x)));
        let rhs = beta.eval(d)? * d;
        if x <= 0.75 {
            // 2x/9 ≤ (2/3)(x/3), both sides also recomputed from the formulas
            let lhs_formula = if x < 0.75 { 2.0 * x / 9.0 } else { 1.0 / 6.0 };
            let c = InequalityCheck::new("", rec.d_f_y, Relation::Eq, rhs);
            let c = InequalityCheck {
                holds: c.holds && (rec.d_f_y - lhs_formula).abs() <= tau() && (rhs - (2.0 / 3.0) * (x / 3.0)).abs() <= tau(),
                ..c
            };
            lower.push((x, c));
        } else if x <= 5.0 / 6.0 + tau() {
            let c = InequalityCheck::new("", rec.d_f_y, Relation::Lt, rhs);
            let in_range = d > 0.25 && d <= 1.0 / 3.0 + tau() && beta.eval(d)? == 2.0 / 3.0;
            middle.push((x, InequalityCheck { holds: c.holds && in_range, ..c }));
        } else {
            let c = InequalityCheck::new("", rec.d_f_y, Relation::Lt, rhs);
            let in_range = d > 1.0 / 3.0 && d < 0.5 && beta.eval(d)? == 0.5;
            upper.push((x, InequalityCheck { holds: c.holds && in_range, ..c }));
        }
    }
    checks.push(InequalityCheck::family("x∈(0,1): unique y matches the branch formula", forced));
    checks.push(InequalityCheck::family("x∈(0,1) (A): d(x,y) = d_F(x) < α(d)·d_F(x)", cond_a));
    checks.push(InequalityCheck::family("x∈(0,3/4] (B): 2x/9 ≤ (2/3)(x/3), equality", lower));
    checks.push(InequalityCheck::family("x∈(3/4,5/6] (B): 1/6 < (2/3)(x−1/2)", middle));
    checks.push(InequalityCheck::family("x∈(5/6,1) (B): 1/6 < (1/2)(x−1/2)", upper));

    // x = 3/4 read through the {2x/3} branch gives the same step
    let y_alt = 2.0 * 0.75 / 3.0;
    let (d_alt, d_f_alt) = step_at(&f, 0.75, y_alt)?;
    checks.push(
        InequalityCheck::new("x=3/4 via 2x/3 (B): d_F(y) ≤ β(1/4)·1/4, equality", d_f_alt, Relation::Eq, beta.eval(d_alt)? * d_alt)
            .with_exact(r(1, 6)),
    );

    let max_product = crate::control::ControlFunction::product(&alpha, &beta)?
        .exact_sup(&crate::interval::Interval::above(0.0))
        .unwrap_or(f64::NAN);
    checks.push(InequalityCheck::new("sup α·β", max_product, Relation::Lt, 1.0).with_exact(r(8, 9)));

    let mut report = ClaimReport::new(
        "claim_3",
        "F is an (α, β)-contraction satisfying the T14 hypotheses",
        checks,
        json!({
            "sample_points": sample.len(),
            "contraction": contraction,
            "preconditions": pre,
        }),
    );
    report.notes.push(
        "x=1 (B): the left side is d_F(1/3) = dist(1/3, {2/9}) = 1/9, not 2/9; 2/9 is the right side β(2/3)·2/3".into(),
    );
    Ok(report)
}
