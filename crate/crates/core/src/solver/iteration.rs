//! The Picard-type iteration `x_{n+1} = select_step(x_n)` and its
//! diagnostics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::control::ControlFunction;
use crate::error::{Error, Result};
use crate::metric::{Metric, Point};
use crate::multimap::{d_f, select_step, MultivaluedMap, SelectionRecord};
use crate::report::{Property, PropertyReport, Witness, WitnessLog};
use crate::tolerance::{tau, MU};

/// Minimal trace length for limit estimation.
pub const MIN_CLASSIFY_STEPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopRule {
    pub eps_fp: f64,
    pub max_steps: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            eps_fp: 1e-9,
            max_steps: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxSteps,
    SelectionFailed,
    MonotonicityViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub map: String,
    pub x0: Point,
    pub steps: Vec<SelectionRecord>,
    /// `d_F` at the final point.
    pub delta_est: f64,
    /// Minimum of `d_n` over the final quartile; `0` for empty traces.
    pub nabla_est: f64,
    pub stop_reason: StopReason,
    pub final_point: Point,
    #[serde(rename = "final_d_F")]
    pub final_d_f: f64,
    /// Best candidate at the point where selection failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_selection: Option<SelectionRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::Converged
    }

    /// `x_0, x_1, …, x_N`.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = vec![self.x0.clone()];
        pts.extend(self.steps.iter().map(|s| s.y.clone()));
        pts
    }

    /// `d_F(x_0), …, d_F(x_N)`.
    pub fn d_f_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.steps.iter().map(|s| s.d_f_x).collect();
        v.push(self.final_d_f);
        v
    }
}

fn final_quartile_min(steps: &[SelectionRecord]) -> f64 {
    if steps.is_empty() {
        return 0.0;
    }
    let start = steps.len() - steps.len().div_ceil(4);
    steps[start..].iter().map(|s| s.d_xy).fold(f64::INFINITY, f64::min)
}

/// Iterates the selection oracle from `x0`.
///
/// Selection failures and increases of `d_F` beyond `τ` end the trace with
/// the matching stop reason; evaluation outside the domain is an error.
pub fn iterate(
    f: &MultivaluedMap,
    x0: &Point,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
    stop: StopRule,
) -> Result<IterationTrace> {
    if stop.max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
    }
    if !(stop.eps_fp > 0.0) {
        return Err(Error::InvalidParameter(format!("eps_fp must be positive, got {}", stop.eps_fp)));
    }
    let mut x = x0.clone();
    let mut dfx = d_f(f, &x, m)?;
    let mut steps = Vec::new();
    let mut failed = None;
    let reason = loop {
        if dfx <= stop.eps_fp {
            break StopReason::Converged;
        }
        if steps.len() >= stop.max_steps {
            break StopReason::MaxSteps;
        }
        let rec = match select_step(f, &x, alpha, beta, m) {
            Ok(rec) => rec,
            Err(Error::NotAbMapping { near_miss }) => {
                failed = Some(*near_miss);
                break StopReason::SelectionFailed;
            }
            Err(e) => return Err(e),
        };
        let increased = rec.d_f_y > rec.d_f_x + tau();
        x = rec.y.clone();
        dfx = rec.d_f_y;
        steps.push(rec);
        if increased {
            break StopReason::MonotonicityViolated;
        }
    };
    Ok(IterationTrace {
        map: f.label().to_string(),
        x0: x0.clone(),
        nabla_est: final_quartile_min(&steps),
        delta_est: dfx,
        steps,
        stop_reason: reason,
        final_point: x,
        final_d_f: dfx,
        failed_selection: failed,
    })
}

/// Per-step checks: chaining, (B_n), strict decrease of `d_F` above `μ`,
/// and `d_F(x_n) ≤ d_n ≤ C·d_F(x_n) + τ`.
pub fn trace_invariants(trace: &IterationTrace, c_sup_alpha: f64) -> PropertyReport {
    let tol = tau();
    let mut log = WitnessLog::new();
    let step = |n: usize| n as f64;
    for (n, s) in trace.steps.iter().enumerate() {
        let expected_x = if n == 0 { &trace.x0 } else { &trace.steps[n - 1].y };
        if s.x != *expected_x {
            log.push(Witness::scalar(step(n), f64::NAN, f64::NEG_INFINITY).with_note("broken chain"));
        }
        if s.margin_b < -tol {
            log.push(Witness::scalar(step(n), s.d_f_y, s.margin_b).with_note("d_F(x_{n+1}) ≤ β(d_n)·d_n"));
        }
        if s.d_f_x > MU && s.d_f_y >= s.d_f_x {
            log.push(Witness::scalar(step(n), s.d_f_y, s.d_f_x - s.d_f_y).with_note("d_F(x_{n+1}) < d_F(x_n)"));
        }
        if s.d_f_x > s.d_xy + tol {
            log.push(Witness::scalar(step(n), s.d_xy, s.d_xy - s.d_f_x).with_note("d_F(x_n) ≤ d_n"));
        }
        let cap = c_sup_alpha * s.d_f_x + tol;
        if s.d_xy > cap {
            log.push(Witness::scalar(step(n), s.d_xy, cap - s.d_xy).with_note("d_n ≤ C·d_F(x_n)"));
        }
    }
    let params = json!({ "steps": trace.len(), "C_sup_alpha": c_sup_alpha });
    PropertyReport::from_log(Property::TraceInvariants, log, params)
}

/// `d_{n+1} < d_n + τ` along the trace (expected under nonincreasing α).
pub fn steps_nonincreasing(trace: &IterationTrace) -> PropertyReport {
    let mut log = WitnessLog::new();
    for (n, w) in trace.steps.windows(2).enumerate() {
        let rise = w[1].d_xy - w[0].d_xy;
        if rise >= tau() {
            log.push(Witness::scalar((n + 1) as f64, w[1].d_xy, -rise).with_note("d_{n+1} < d_n"));
        }
    }
    PropertyReport::from_log(Property::Nonincreasing, log, json!({ "steps": trace.len() }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitCase {
    /// `0 < Δ < ∇`
    #[serde(rename = "case_I")]
    CaseI,
    /// `0 < Δ = ∇`
    #[serde(rename = "case_II")]
    CaseII,
    /// `0 = Δ = ∇`
    #[serde(rename = "case_III")]
    CaseIII,
}

/// Classifies the tail of a trace by `Δ = delta_est` and `∇ = nabla_est`.
///
/// Converged traces are case III regardless of length.
pub fn classify_limit_case(trace: &IterationTrace) -> Result<LimitCase> {
    if trace.converged() {
        return Ok(LimitCase::CaseIII);
    }
    if trace.len() < MIN_CLASSIFY_STEPS {
        return Err(Error::TooShort {
            needed: MIN_CLASSIFY_STEPS,
            got: trace.len(),
        });
    }
    let (delta, nabla) = (trace.delta_est, trace.nabla_est);
    if delta <= MU && nabla <= MU {
        return Ok(LimitCase::CaseIII);
    }
    if nabla < delta - MU {
        return Err(Error::Precondition(format!(
            "tail estimates contradict d_F(x_n) ≤ d_n: Δ = {delta}, ∇ = {nabla}"
        )));
    }
    Ok(if nabla - delta <= MU {
        LimitCase::CaseII
    } else {
        LimitCase::CaseI
    })
}

/// `d_F(x*) ≤ tol`.
pub fn verify_fixed_point(f: &MultivaluedMap, x_star: &Point, m: &dyn Metric, tol: f64) -> Result<bool> {
    Ok(d_f(f, x_star, m)? <= tol)
}

/// Geometric majorant of the second half of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Largest ratio `d_F(x_{n+1})/d_F(x_n)` for `n ≥ start`.
    pub q: f64,
    pub start: usize,
    /// `d_F(x_n) ≤ scale·q^{n − start}` for `n ≥ start`.
    pub scale: f64,
}

/// `None` when the trace has fewer than two positive tail values.
pub fn geometric_tail_fit(trace: &IterationTrace) -> Option<TailFit> {
    let v = trace.d_f_values();
    let start = v.len() / 2;
    let tail: Vec<f64> = v[start..].iter().copied().take_while(|&d| d > 0.0).collect();
    if tail.len() < 2 {
        return None;
    }
    let q = tail.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    Some(TailFit {
        q,
        start,
        scale: tail[0],
    })
}

/// JSON lines: one record per step, then a summary record.
pub fn trace_to_jsonl(trace: &IterationTrace, case: Option<LimitCase>) -> Result<String> {
    let mut out = String::new();
    for (n, s) in trace.steps.iter().enumerate() {
        let rec = json!({
            "n": n,
            "x": s.x,
            "y": s.y,
            "d_n": s.d_xy,
            "dF_x": s.d_f_x,
            "dF_y": s.d_f_y,
            "marginA": s.margin_a,
            "marginB": s.margin_b,
        });
        writeln!(out, "{}", serde_json::to_string(&rec)?).expect("writing to a String");
    }
    let summary = json!({
        "summary": true,
        "map": trace.map,
        "steps": trace.len(),
        "stop_reason": trace.stop_reason,
        "delta_est": trace.delta_est,
        "nabla_est": trace.nabla_est,
        "final_point": trace.final_point,
        "case": case,
    });
    writeln!(out, "{}", serde_json::to_string(&summary)?).expect("writing to a String");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::RangeContract;
    use crate::metric::AbsDiff;
    use crate::multimap::Domain;

    fn constant(label: &str, contract: RangeContract, c: f64) -> ControlFunction {
        ControlFunction::constant(label, contract, c).unwrap()
    }

    fn linear() -> (MultivaluedMap, ControlFunction, ControlFunction) {
        (
            MultivaluedMap::singlevalued("2x/3", Domain::interval(0.0, 1.0), |x| 2.0 * x / 3.0),
            constant("1", RangeContract::Alpha, 1.0),
            constant("2/3", RangeContract::Beta, 2.0 / 3.0),
        )
    }

    #[test]
    fn geometric_decay_matches_closed_form() {
        let (f, a, b) = linear();
        let t = iterate(&f, &Point::scalar(0.5), &a, &b, &AbsDiff, StopRule::default()).unwrap();
        assert!(t.converged());
        // d_F(x_n) = x_n/3 = (1/6)(2/3)^n ≤ 1e-9
        let expected = ((1e-9_f64 * 6.0).ln() / (2.0_f64 / 3.0).ln()).ceil() as usize;
        assert_eq!(t.len(), expected);
        for (n, p) in t.points().iter().enumerate() {
            let closed = 0.5 * (2.0_f64 / 3.0).powi(n as i32);
            assert!((p.x() - closed).abs() < 1e-15);
        }
        assert!(trace_invariants(&t, 1.0).holds());
        assert!(steps_nonincreasing(&t).holds());
        assert_eq!(classify_limit_case(&t).unwrap(), LimitCase::CaseIII);
        let fit = geometric_tail_fit(&t).unwrap();
        assert!((fit.q - 2.0 / 3.0).abs() < 1e-9);
        assert!(verify_fixed_point(&f, &t.final_point, &AbsDiff, 1e-9).unwrap());
    }

    #[test]
    fn fixed_start_gives_empty_trace() {
        let (f, a, b) = linear();
        let t = iterate(&f, &Point::scalar(0.0), &a, &b, &AbsDiff, StopRule::default()).unwrap();
        assert!(t.is_empty() && t.converged());
        assert!(trace_invariants(&t, 1.0).holds());
        assert_eq!(classify_limit_case(&t).unwrap(), LimitCase::CaseIII);
        assert_eq!((t.delta_est, t.nabla_est), (0.0, 0.0));
    }

    #[test]
    fn hand_built_monotonicity_violation() {
        let (f, a, b) = linear();
        let mut t = iterate(&f, &Point::scalar(1.0), &a, &b, &AbsDiff, StopRule::default()).unwrap();
        t.steps[3].d_f_y = t.steps[3].d_f_x * 1.5;
        let r = trace_invariants(&t, 1.0);
        assert!(!r.holds());
        assert!(r.witnesses.iter().any(|w| w.input == vec![3.0]));
    }

    #[test]
    fn selection_failure_and_max_steps_are_stop_reasons() {
        let (f, a, _) = linear();
        let b = constant("0.1", RangeContract::Beta, 0.1);
        let t = iterate(&f, &Point::scalar(1.0), &a, &b, &AbsDiff, StopRule::default()).unwrap();
        assert_eq!(t.stop_reason, StopReason::SelectionFailed);
        assert!(t.failed_selection.is_some());
        let (f, a, b) = linear();
        let stop = StopRule {
            eps_fp: 1e-9,
            max_steps: 5,
        };
        let t = iterate(&f, &Point::scalar(1.0), &a, &b, &AbsDiff, stop).unwrap();
        assert_eq!(t.stop_reason, StopReason::MaxSteps);
        assert!(matches!(classify_limit_case(&t), Err(Error::TooShort { .. })));
    }

    #[test]
    fn escaping_map_is_monotonicity_violation() {
        let f = MultivaluedMap::singlevalued("2x", Domain::real_line(), |x| 2.0 * x);
        let a = constant("1", RangeContract::Alpha, 1.0);
        let b = constant("b", RangeContract::Beta, 0.999_999);
        let t = iterate(&f, &Point::scalar(1.0), &a, &b, &AbsDiff, StopRule::default()).unwrap();
        assert!(matches!(t.stop_reason, StopReason::MonotonicityViolated | StopReason::SelectionFailed));
    }

    #[test]
    fn out_of_domain_is_error() {
        let f = MultivaluedMap::singlevalued("x+1", Domain::interval(0.0, 1.0), |x| x + 1.0);
        let a = constant("1", RangeContract::Alpha, 1.0);
        let b = constant("b", RangeContract::Beta, 0.5);
        assert!(iterate(&f, &Point::scalar(0.5), &a, &b, &AbsDiff, StopRule::default()).is_err());
    }

    #[test]
    fn jsonl_export() {
        let (f, a, b) = linear();
        let t = iterate(&f, &Point::scalar(1.0), &a, &b, &AbsDiff, StopRule::default()).unwrap();
        let text = trace_to_jsonl(&t, Some(LimitCase::CaseIII)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), t.len() + 1);
        let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        for key in ["n", "x", "y", "d_n", "dF_x", "dF_y", "marginA", "marginB"] {
            assert!(first.get(key).is_some(), "{key}");
        }
        let last: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
        assert_eq!(last["case"], "case_III");
        assert_eq!(last["stop_reason"], "converged");
    }
}
