//! Sampled semi-decision procedures for properties of control functions.
//!
//! A `holds_on_sample` verdict certifies the property only on the sample;
//! a `violated` verdict always carries concrete witnesses.

use serde::Serialize;
use serde_json::json;

use super::derived::p_from_gamma;
use super::function::{ControlFunction, RangeContract};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metric::{neighborhood_points, Metric, NeighborhoodSampling, Point};
use crate::report::{Property, PropertyReport, Witness, WitnessLog};
use crate::sampling::{right_approach, GridSpec};
use crate::tolerance::{tau, MU};

/// Depth of the geometric approach used by sampled right-window sups.
const APPROACH_DEPTH: u32 = 40;
/// Minimum number of uniform samples per window.
const MIN_WINDOW_SAMPLES: usize = 32;
/// Radii tried by [`check_stably_positive`]: `r, r/2, …, r/2^LADDER_DEPTH`.
pub const LADDER_DEPTH: u32 = 8;
/// Lattice resolution per radius in [`check_stably_positive`].
const LATTICE_DIVISIONS: f64 = 8.0;

/// Sup of `f` over `(t, t + window] ∩ dom f`.
///
/// Exact for piecewise functions. Closures are sampled uniformly and along a
/// geometric sequence converging to `t` from the right, so the estimate
/// tracks the right lim sup. `None` when the window misses the domain.
pub fn window_sup(f: &ControlFunction, t: f64, window: f64, step: f64) -> Result<Option<f64>> {
    let query = Interval::open_closed(t, t + window);
    if f.is_piecewise() {
        return Ok(f.exact_sup(&query));
    }
    let k = ((window / step).ceil() as usize).max(MIN_WINDOW_SAMPLES);
    let uniform = (1..=k).map(|j| t + window * j as f64 / k as f64);
    let mut sup: Option<f64> = None;
    for s in uniform.chain(right_approach(t, window, APPROACH_DEPTH)) {
        if s <= t || !f.domain().contains(s) {
            continue;
        }
        let v = f.eval(s)?;
        sup = Some(sup.map_or(v, |m: f64| m.max(v)));
    }
    Ok(sup)
}

fn ensure_unit_valued(f: &ControlFunction, grid: &[f64]) -> Result<()> {
    if f.contract() == RangeContract::Beta {
        return Ok(());
    }
    let pts = f.validation_points();
    for &t in grid.iter().chain(&pts) {
        if !f.domain().contains(t) {
            continue;
        }
        let v = f.eval(t)?;
        if !(v >= -tau() && v < 1.0) {
            return Err(Error::NotUnitValued {
                label: f.label().to_string(),
                at: t,
                value: v,
            });
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LimsupParams<'a> {
    function: &'a str,
    grid: &'a GridSpec,
    window: f64,
    method: &'static str,
}

fn limsup_check(
    property: Property,
    f: &ControlFunction,
    grid: &GridSpec,
    window: f64,
) -> Result<PropertyReport> {
    grid.validate()?;
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::InvalidParameter(format!("window must be positive, got {window}")));
    }
    let pts = grid.points();
    ensure_unit_valued(f, &pts)?;
    let mut log = WitnessLog::new();
    let threshold = 1.0 - MU;
    for &t in &pts {
        if property == Property::R && t <= tau() {
            continue;
        }
        if t < f.domain().lo - tau() {
            continue;
        }
        if let Some(sup) = window_sup(f, t, window, grid.step)? {
            if sup > threshold {
                log.push(Witness::scalar(t, sup, threshold - sup));
            }
        }
    }
    let params = LimsupParams {
        function: f.label(),
        grid,
        window,
        method: if f.is_piecewise() { "exact_pieces" } else { "sampled" },
    };
    Ok(PropertyReport::from_log(property, log, serde_json::to_value(params)?))
}

/// (MT): `sup f(t, t + window] ≤ 1 − μ` at every grid point `t ≥ 0`.
pub fn check_mt(f: &ControlFunction, grid: &GridSpec, window: f64) -> Result<PropertyReport> {
    limsup_check(Property::Mt, f, grid, window)
}

/// (R): as [`check_mt`] with `t = 0` excluded.
pub fn check_r(f: &ControlFunction, grid: &GridSpec, window: f64) -> Result<PropertyReport> {
    limsup_check(Property::R, f, grid, window)
}

/// `inf{h(s) : s ≥ a} > μ` for each `a` in `a_grid`, the inf taken over
/// `[a, sample.hi]`.
pub fn check_essentially_positive(
    h: &ControlFunction,
    a_grid: &[f64],
    sample: &GridSpec,
) -> Result<PropertyReport> {
    sample.validate()?;
    let pts: Vec<f64> = sample
        .points()
        .into_iter()
        .filter(|&s| h.domain().contains(s))
        .collect();
    for &s in &pts {
        let v = h.eval(s)?;
        if v < -tau() {
            return Err(Error::RangeContract {
                label: h.label().to_string(),
                contract: "nonnegative".into(),
                at: s,
                value: v,
            });
        }
    }
    let mut log = WitnessLog::new();
    for &a in a_grid {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        let inf = if h.is_piecewise() {
            h.exact_inf(&Interval::closed(a, sample.hi))
        } else {
            let own = h.domain().contains(a).then(|| h.eval(a)).transpose()?;
            pts.iter()
                .filter(|&&s| s >= a && s <= sample.hi)
                .map(|&s| h.eval(s))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .chain(own)
                .reduce(f64::min)
        };
        match inf {
            Some(v) if v > MU => {}
            Some(v) => log.push(Witness::scalar(a, v, v - MU)),
            None => log.push(Witness::scalar(a, f64::NAN, f64::NAN).with_note("no samples in [a, T]")),
        }
    }
    let params = json!({
        "function": h.label(),
        "a_grid": a_grid,
        "sample": sample,
        "method": if h.is_piecewise() { "exact_pieces" } else { "sampled" },
    });
    Ok(PropertyReport::from_log(Property::EssentiallyPositive, log, params))
}

/// Stable positivity of `h` on `domain_sample`.
///
/// For every sampled `x` with `h(x) > μ`, some radius `r' = r/2^j`,
/// `j ≤ LADDER_DEPTH`, must give a neighborhood inf above `μ`. The ball is
/// sampled on a lattice of step `r'/8` clipped to the bounding box of the
/// domain sample.
pub fn check_stably_positive<H>(
    h: H,
    domain_sample: &[Point],
    r: f64,
    m: &dyn Metric,
) -> Result<PropertyReport>
where
    H: Fn(&Point) -> Result<f64>,
{
    let first = domain_sample.first().ok_or(Error::EmptySet)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let dim = first.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in domain_sample {
        if p.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: p.dim(),
            });
        }
        for (i, c) in p.coords().iter().enumerate() {
            lo[i] = lo[i].min(*c);
            hi[i] = hi[i].max(*c);
        }
    }
    let tol = tau();
    let in_hull = |p: &Point| {
        p.coords()
            .iter()
            .enumerate()
            .all(|(i, c)| *c >= lo[i] - tol && *c <= hi[i] + tol)
    };

    let mut log = WitnessLog::new();
    let mut positive = 0usize;
    for x in domain_sample {
        let hx = h(x)?;
        if hx <= MU {
            continue;
        }
        positive += 1;
        let mut best = f64::NEG_INFINITY;
        let mut stable = false;
        for j in 0..=LADDER_DEPTH {
            let radius = r * 0.5_f64.powi(j as i32);
            let sampling = NeighborhoodSampling::Grid {
                step: radius / LATTICE_DIVISIONS,
            };
            let mut inf = f64::INFINITY;
            for p in neighborhood_points(x, radius, &sampling, m)? {
                if in_hull(&p) {
                    inf = inf.min(h(&p)?);
                }
            }
            best = best.max(inf);
            if inf > MU {
                stable = true;
                break;
            }
        }
        if !stable {
            log.push(Witness {
                input: x.coords().to_vec(),
                value: hx,
                margin: best - MU,
                note: Some("no sampled neighborhood keeps h above μ".into()),
            });
        }
    }
    let params = json!({
        "radius": r,
        "ladder_depth": LADDER_DEPTH,
        "lattice_divisions": LATTICE_DIVISIONS,
        "sample_size": domain_sample.len(),
        "positive_points": positive,
        "metric": m.name(),
    });
    Ok(PropertyReport::from_log(Property::StablyPositive, log, params))
}

/// `f(t_{i+1}) ≤ f(t_i) + τ` along the grid, refined around breakpoints.
pub fn check_nonincreasing(f: &ControlFunction, grid: &GridSpec) -> Result<PropertyReport> {
    grid.validate()?;
    let bps = f.breakpoints();
    let extra = bps.iter().flat_map(|&b| [b - 1e-7, b, b + 1e-7]);
    let pts: Vec<f64> = grid
        .clone()
        .with_extra(extra)
        .points()
        .into_iter()
        .filter(|&t| t >= grid.lo && t <= grid.hi && f.domain().contains(t))
        .collect();
    let mut log = WitnessLog::new();
    let values = pts.iter().map(|&t| f.eval(t)).collect::<Result<Vec<_>>>()?;
    for i in 1..pts.len() {
        let rise = values[i] - values[i - 1];
        if rise > tau() {
            log.push(Witness::scalar(pts[i], values[i], -rise));
        }
    }
    let params = json!({ "function": f.label(), "grid": grid });
    Ok(PropertyReport::from_log(Property::Nonincreasing, log, params))
}

/// Sup of `f` on the grid (exact for pieces over `[grid.lo, ∞) ∩ dom f`),
/// with a `bounded` verdict when the sup is finite.
pub fn check_bounded(f: &ControlFunction, grid: &GridSpec) -> Result<(PropertyReport, f64)> {
    grid.validate()?;
    let sup = if f.is_piecewise() {
        f.exact_sup(&Interval::from(grid.lo)).unwrap_or(f64::NEG_INFINITY)
    } else {
        let mut sup = f64::NEG_INFINITY;
        for t in grid.points() {
            if f.domain().contains(t) {
                sup = sup.max(f.eval(t)?);
            }
        }
        sup
    };
    let mut log = WitnessLog::new();
    if !sup.is_finite() {
        log.push(Witness::scalar(grid.hi, sup, f64::NEG_INFINITY).with_note("unbounded"));
    }
    let params = json!({ "function": f.label(), "grid": grid, "sup": sup });
    Ok((PropertyReport::from_log(Property::Bounded, log, params), sup))
}

/// Numeric certificate that `αβ` inherits (MT) from `β`:
/// checks `α ≤ 1 + γ(1 − β)` (hard error otherwise), then
/// `α(t)β(t) ≤ 1 − p(1 − β(t)) + τ` at each grid point, then (MT) for the
/// product.
pub fn lemma21_certificate(
    alpha: &ControlFunction,
    beta: &ControlFunction,
    gamma: &ControlFunction,
    grid: &GridSpec,
    window: f64,
) -> Result<PropertyReport> {
    grid.validate()?;
    let p = p_from_gamma(gamma)?;
    let tol = tau();
    let mut log = WitnessLog::new();
    let pts: Vec<f64> = grid
        .points()
        .into_iter()
        .filter(|&t| alpha.domain().contains(t) && beta.domain().contains(t))
        .collect();
    for &t in &pts {
        let a = alpha.eval(t)?;
        let b = beta.eval(t)?;
        let bound = 1.0 + gamma.eval(1.0 - b)?;
        if a > bound + tol {
            return Err(Error::AlphaBound {
                at: t,
                alpha: a,
                bound,
            });
        }
        let majorant = 1.0 - p.eval(1.0 - b)?;
        if a * b > majorant + tol {
            log.push(Witness::scalar(t, a * b, majorant - a * b).with_note("αβ ≤ 1 − p(1 − β)"));
        }
    }
    let pointwise_violations = log.count();
    let product = ControlFunction::product(alpha, beta)?;
    let mt = match check_mt(&product, grid, window) {
        Ok(report) => {
            for w in &report.witnesses {
                log.push(w.clone().with_note("(MT) for αβ"));
            }
            report.verdict
        }
        Err(Error::NotUnitValued { at, value, .. }) => {
            log.push(Witness::scalar(at, value, 1.0 - value).with_note("αβ leaves [0,1)"));
            crate::report::Verdict::Violated
        }
        Err(e) => return Err(e),
    };
    let params = json!({
        "grid": grid,
        "window": window,
        "pointwise_violations": pointwise_violations,
        "product_mt": mt,
    });
    Ok(PropertyReport::from_log(Property::ProductMajorant, log, params))
}

/// Sampled `Q_ε = sup{α(t)β(t) : α(t) ≥ 1 + ε}` with the matching sup of
/// the majorant `1 − p(1 − β(t))` over the same preimage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QEpsilon {
    /// `−∞` when no grid point lies in the preimage.
    pub value: f64,
    pub majorant: f64,
    pub preimage_points: usize,
}

impl QEpsilon {
    pub fn is_empty(&self) -> bool {
        self.preimage_points == 0
    }
}

pub fn q_epsilon(
    alpha: &ControlFunction,
    beta: &ControlFunction,
    p: &ControlFunction,
    eps: f64,
    grid: &GridSpec,
) -> Result<QEpsilon> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    grid.validate()?;
    let mut out = QEpsilon {
        value: f64::NEG_INFINITY,
        majorant: f64::NEG_INFINITY,
        preimage_points: 0,
    };
    for t in grid.points() {
        if !(alpha.domain().contains(t) && beta.domain().contains(t)) {
            continue;
        }
        let a = alpha.eval(t)?;
        if a < 1.0 + eps - tau() {
            continue;
        }
        let b = beta.eval(t)?;
        out.value = out.value.max(a * b);
        out.majorant = out.majorant.max(1.0 - p.eval(1.0 - b)?);
        out.preimage_points += 1;
    }
    Ok(out)
}
