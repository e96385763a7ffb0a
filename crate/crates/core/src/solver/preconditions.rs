//! Hypothesis validation for the three fixed-point theorems.

use serde::{Deserialize, Serialize};

use crate::control::{
    check_bounded, check_essentially_positive, check_mt, check_nonincreasing, p_from_gamma,
    ControlFunction,
};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::report::{PropertyReport, Verdict, Witness, WitnessLog};
use crate::sampling::{GridSpec, DEFAULT_WINDOW};
use crate::tolerance::{tau, MU};

/// Thresholds `a` used for essential positivity of `p`.
pub const ESSENTIAL_A_GRID: [f64; 7] = [0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 1.0];
/// Exponents `j` of the probes `2^{-j}` for `lim_{s→0} γ(s) = 0`.
const GAMMA_LIMIT_PROBES: std::ops::RangeInclusive<i32> = 30..=36;

/// Hypothesis set to validate, with the controls it needs.
#[derive(Clone, Debug)]
pub enum TheoremMode {
    /// β has (MT); `α ≤ 1 + γ(1 − β)`; γ bounded with `γ(s) → 0`;
    /// `p(s) = s − (1 − s)γ(s)` essentially positive.
    T14 {
        alpha: ControlFunction,
        beta: ControlFunction,
        gamma: ControlFunction,
    },
    /// αβ has (MT); α nonincreasing.
    T15 {
        alpha: ControlFunction,
        beta: ControlFunction,
    },
    /// α bounded; `αβ ≤ 1 − C·t^p` on `neighborhood`.
    T16 {
        alpha: ControlFunction,
        beta: ControlFunction,
        c: f64,
        p: f64,
        neighborhood: Interval,
    },
}

impl TheoremMode {
    pub fn name(&self) -> &'static str {
        match self {
            TheoremMode::T14 { .. } => "T14",
            TheoremMode::T15 { .. } => "T15",
            TheoremMode::T16 { .. } => "T16",
        }
    }

    pub fn alpha(&self) -> &ControlFunction {
        match self {
            TheoremMode::T14 { alpha, .. } | TheoremMode::T15 { alpha, .. } | TheoremMode::T16 { alpha, .. } => alpha,
        }
    }

    pub fn beta(&self) -> &ControlFunction {
        match self {
            TheoremMode::T14 { beta, .. } | TheoremMode::T15 { beta, .. } | TheoremMode::T16 { beta, .. } => beta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub hypothesis: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub violations: usize,
}

impl HypothesisCheck {
    fn from_report(hypothesis: &str, r: PropertyReport) -> Self {
        Self {
            hypothesis: hypothesis.into(),
            verdict: r.verdict,
            witnesses: r.witnesses,
            violations: r.violations,
        }
    }

    fn from_log(hypothesis: &str, log: WitnessLog) -> Self {
        let (witnesses, violations) = log.finish();
        Self {
            hypothesis: hypothesis.into(),
            verdict: Verdict::from_holds(violations == 0),
            witnesses,
            violations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreconditionReport {
    pub mode: String,
    pub checks: Vec<HypothesisCheck>,
    pub overall: Verdict,
    /// Sup of α over the grid (exact for piecewise α over `[grid.lo, ∞)`).
    #[serde(rename = "C_sup_alpha")]
    pub c_sup_alpha: f64,
    pub grid: GridSpec,
}

impl PreconditionReport {
    pub fn holds(&self) -> bool {
        self.overall.holds()
    }

    pub fn check(&self, hypothesis: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.hypothesis == hypothesis)
    }
}

/// (MT) for `f`, with "not unit valued" turned into a violation.
fn mt_check(hypothesis: &str, f: &ControlFunction, grid: &GridSpec) -> Result<HypothesisCheck> {
    match check_mt(f, grid, DEFAULT_WINDOW) {
        Ok(r) => Ok(HypothesisCheck::from_report(hypothesis, r)),
        Err(Error::NotUnitValued { at, value, .. }) => {
            let mut log = WitnessLog::new();
            log.push(Witness::scalar(at, value, 1.0 - value).with_note("leaves [0,1)"));
            Ok(HypothesisCheck::from_log(hypothesis, log))
        }
        Err(e) => Err(e),
    }
}

fn grid_points_in(f: &ControlFunction, grid: &GridSpec) -> Vec<f64> {
    let mut pts = grid.clone().with_extra(f.breakpoints()).points();
    pts.retain(|&t| t >= grid.lo && t <= grid.hi && f.domain().contains(t));
    pts
}

fn alpha_bound_check(
    alpha: &ControlFunction,
    beta: &ControlFunction,
    gamma: &ControlFunction,
    grid: &GridSpec,
) -> Result<HypothesisCheck> {
    let mut log = WitnessLog::new();
    let mut pts = grid_points_in(alpha, grid);
    pts.extend(beta.breakpoints().into_iter().filter(|&t| t >= grid.lo && t <= grid.hi));
    for t in crate::sampling::sorted_unique(pts) {
        let a = alpha.eval(t)?;
        let bound = 1.0 + gamma.eval(1.0 - beta.eval(t)?)?;
        if a > bound + tau() {
            log.push(Witness::scalar(t, a, bound - a).with_note("α ≤ 1 + γ(1 − β)"));
        }
    }
    Ok(HypothesisCheck::from_log("alpha_bound", log))
}

fn gamma_limit_check(gamma: &ControlFunction, grid: &GridSpec) -> Result<HypothesisCheck> {
    let mut probes: Vec<f64> = GAMMA_LIMIT_PROBES.map(|j| 0.5_f64.powi(j)).collect();
    probes.extend(
        grid.points()
            .into_iter()
            .filter(|&s| gamma.domain().contains(s))
            .take(1),
    );
    let mut log = WitnessLog::new();
    for s in probes {
        if !gamma.domain().contains(s) {
            continue;
        }
        let v = gamma.eval(s)?;
        // the smallest probes must already sit below μ; the grid point only
        // has to be finite
        if s < 1e-6 && v >= MU {
            log.push(Witness::scalar(s, v, MU - v).with_note("γ(s) → 0"));
        }
    }
    Ok(HypothesisCheck::from_log("gamma_limit_zero", log))
}

fn unit_grid(grid: &GridSpec) -> GridSpec {
    GridSpec::new(0.0, 1.0, grid.step)
}

/// Validates the hypotheses of `mode` on `grid`.
pub fn validate_preconditions(mode: &TheoremMode, grid: &GridSpec) -> Result<PreconditionReport> {
    grid.validate()?;
    let alpha = mode.alpha();
    let (_, c_sup_alpha) = check_bounded(alpha, grid)?;
    let mut checks = Vec::new();
    match mode {
        TheoremMode::T14 { alpha, beta, gamma } => {
            checks.push(mt_check("beta_mt", beta, grid)?);
            checks.push(alpha_bound_check(alpha, beta, gamma, grid)?);
            let (bounded, _) = check_bounded(gamma, &unit_grid(grid))?;
            checks.push(HypothesisCheck::from_report("gamma_bounded", bounded));
            checks.push(gamma_limit_check(gamma, grid)?);
            let p = p_from_gamma(gamma)?;
            let ep = match check_essentially_positive(&p, &ESSENTIAL_A_GRID, &unit_grid(grid)) {
                Ok(r) => HypothesisCheck::from_report("p_essentially_positive", r),
                Err(Error::RangeContract { at, value, .. }) => {
                    let mut log = WitnessLog::new();
                    log.push(Witness::scalar(at, value, value).with_note("p is negative"));
                    HypothesisCheck::from_log("p_essentially_positive", log)
                }
                Err(e) => return Err(e),
            };
            checks.push(ep);
        }
        TheoremMode::T15 { alpha, beta } => {
            let product = ControlFunction::product(alpha, beta)?;
            checks.push(mt_check("product_mt", &product, grid)?);
            checks.push(HypothesisCheck::from_report(
                "alpha_nonincreasing",
                check_nonincreasing(alpha, grid)?,
            ));
        }
        TheoremMode::T16 {
            alpha,
            beta,
            c,
            p,
            neighborhood,
        } => {
            if !(*c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
            }
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::InvalidParameter(format!("p must lie in (0,1), got {p}")));
            }
            if neighborhood.is_empty() || neighborhood.lo < 0.0 {
                return Err(Error::InvalidParameter(format!("bad neighborhood {neighborhood}")));
            }
            let (bounded, _) = check_bounded(alpha, grid)?;
            checks.push(HypothesisCheck::from_report("alpha_bounded", bounded));
            let mut log = WitnessLog::new();
            let mut pts = grid.clone().with_extra(neighborhood.finite_endpoints()).points();
            pts.extend(alpha.breakpoints().into_iter().chain(beta.breakpoints()));
            for t in crate::sampling::sorted_unique(pts) {
                if !neighborhood.contains(t) {
                    continue;
                }
                let prod = alpha.eval(t)? * beta.eval(t)?;
                let majorant = 1.0 - c * t.powf(*p);
                if prod > majorant + tau() {
                    log.push(Witness::scalar(t, prod, majorant - prod).with_note("αβ ≤ 1 − C·t^p"));
                }
            }
            checks.push(HypothesisCheck::from_log("power_majorant", log));
        }
    }
    let overall = checks
        .iter()
        .fold(Verdict::HoldsOnSample, |acc, c| acc.and(c.verdict));
    Ok(PreconditionReport {
        mode: mode.name().into(),
        checks,
        overall,
        c_sup_alpha,
        grid: grid.clone(),
    })
}
