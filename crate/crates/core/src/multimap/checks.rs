//! Sample-based checks of map-wide conditions.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::map::{d_f, MultivaluedMap};
use super::selection::select_step;
use crate::control::{ControlFunction, RangeContract, Shape};
use crate::error::{Error, Result};
use crate::metric::{dist_point_set, hausdorff, FiniteClosedSet, Metric, Point};
use crate::report::{Verdict, Witness, WitnessLog};
use crate::sampling::sorted_unique;
use crate::tolerance::{tau, MU};

/// Resolution of the `t`-grid used for the product bound.
const PRODUCT_GRID: usize = 1000;
/// Default cap on α produced by [`embed_hausdorff`].
pub const EMBED_CAP: f64 = 10.0;
/// Guard for the division by `k(t)` in [`embed_hausdorff`].
pub const EMBED_DENOMINATOR_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapCheckKind {
    AbMapping,
    AbContraction,
    HausdorffKContraction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapCheckReport {
    pub kind: MapCheckKind,
    pub map: String,
    pub verdict: Verdict,
    /// Sorted by input, truncated to `MAX_WITNESSES`.
    pub witnesses: Vec<Witness>,
    pub violations: usize,
    pub sample: serde_json::Value,
}

impl MapCheckReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    fn build(kind: MapCheckKind, map: &str, log: WitnessLog, sample: serde_json::Value) -> Self {
        let (witnesses, violations) = log.finish();
        Self {
            kind,
            map: map.to_string(),
            verdict: Verdict::from_holds(violations == 0),
            witnesses,
            violations,
            sample,
        }
    }
}

/// Runs [`select_step`] at every sample point.
///
/// A point fails only when its best candidate misses (A) or (B) by more
/// than `μ`; misses between `τ` and `μ` are counted under `marginal`.
pub fn check_ab_mapping(
    f: &MultivaluedMap,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
    sample: &[Point],
) -> Result<MapCheckReport> {
    let (log, marginal, _) = mapping_pass(f, alpha, beta, m, sample)?;
    let params = json!({ "points": sample.len(), "marginal": marginal, "metric": m.name() });
    Ok(MapCheckReport::build(MapCheckKind::AbMapping, f.label(), log, params))
}

fn mapping_pass(
    f: &MultivaluedMap,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
    sample: &[Point],
) -> Result<(WitnessLog, usize, f64)> {
    let mut log = WitnessLog::new();
    let mut marginal = 0;
    let mut max_step = 0.0_f64;
    for x in sample {
        match select_step(f, x, alpha, beta, m) {
            Ok(rec) => max_step = max_step.max(rec.d_xy),
            Err(Error::NotAbMapping { near_miss }) => {
                let margin = near_miss.worst_margin();
                if margin < -MU {
                    let which = if near_miss.margin_a < near_miss.margin_b { "A" } else { "B" };
                    log.push(Witness {
                        input: x.coords().to_vec(),
                        value: near_miss.d_xy,
                        margin,
                        note: Some(format!("no admissible y; best y = {:?} fails ({which})", near_miss.y)),
                    });
                } else {
                    marginal += 1;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok((log, marginal, max_step))
}

/// Upper bound on the diameter of `sample` from the triangle inequality.
fn diameter_bound(sample: &[Point], m: &dyn Metric) -> f64 {
    sample
        .first()
        .map(|x0| 2.0 * sample.iter().map(|x| m.distance(x0, x)).fold(0.0, f64::max))
        .unwrap_or(0.0)
}

/// [`check_ab_mapping`] plus `α(t)β(t) < 1 − μ` on a grid of `(0, diam]`
/// refined at the breakpoints of α and β.
pub fn check_ab_contraction(
    f: &MultivaluedMap,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
    sample: &[Point],
) -> Result<MapCheckReport> {
    let (mut log, marginal, max_step) = mapping_pass(f, alpha, beta, m, sample)?;
    let diam = diameter_bound(sample, m).max(max_step);
    let mut ts: Vec<f64> = (1..=PRODUCT_GRID).map(|i| diam * i as f64 / PRODUCT_GRID as f64).collect();
    for b in alpha.breakpoints().into_iter().chain(beta.breakpoints()) {
        ts.extend([b, b + 1e-9, b - 1e-9]);
    }
    let ts: Vec<f64> = sorted_unique(ts)
        .into_iter()
        .filter(|&t| t > tau() && t <= diam + tau())
        .collect();
    for &t in &ts {
        let product = alpha.eval(t)? * beta.eval(t)?;
        if product >= 1.0 - MU {
            log.push(Witness::scalar(t, product, 1.0 - MU - product).with_note("α(t)β(t) < 1"));
        }
    }
    let params = json!({
        "points": sample.len(),
        "marginal": marginal,
        "metric": m.name(),
        "t_grid": { "lo": ts.first(), "hi": diam, "points": ts.len() },
    });
    Ok(MapCheckReport::build(MapCheckKind::AbContraction, f.label(), log, params))
}

/// `H(F(x), F(y)) ≤ k(d(x,y))·d(x,y) + τ` at every pair.
pub fn check_hausdorff_contraction(
    f: &MultivaluedMap,
    k: &ControlFunction,
    m: &dyn Metric,
    pairs: &[(Point, Point)],
) -> Result<MapCheckReport> {
    let mut log = WitnessLog::new();
    let mut worst = f64::INFINITY;
    let mut marginal = 0;
    for (x, y) in pairs {
        let d = m.distance(x, y);
        let h = hausdorff(&f.eval(x)?, &f.eval(y)?, m)?;
        let margin = k.eval(d)? * d - h;
        worst = worst.min(margin);
        if margin < -MU {
            let mut input = x.coords().to_vec();
            input.extend_from_slice(y.coords());
            log.push(Witness {
                input,
                value: h,
                margin,
                note: Some(format!("H(F(x),F(y)) > k(d)·d with d = {d}")),
            });
        } else if margin < -tau() {
            marginal += 1;
        }
    }
    let params = json!({
        "pairs": pairs.len(),
        "marginal": marginal,
        "metric": m.name(),
        "k": k.label(),
        "worst_margin": if worst.is_finite() { json!(worst) } else { json!(null) },
    });
    Ok(MapCheckReport::build(MapCheckKind::HausdorffKContraction, f.label(), log, params))
}

fn embed_value(k: f64, slack: f64) -> f64 {
    (1.0 + slack * (1.0 - k) / k.max(EMBED_DENOMINATOR_FLOOR)).min(EMBED_CAP)
}

/// `(α, β)` controls for a Hausdorff `k`-contraction: `β = k` and
/// `α = min(1 + slack·(1 − k)/max(k, 1e-9), 10)`, so that `α·k < 1`.
pub fn embed_hausdorff(k: &ControlFunction, slack: f64) -> Result<(ControlFunction, ControlFunction)> {
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Error::InvalidParameter(format!("slack must lie in (0,1), got {slack}")));
    }
    let beta = k.clone().with_contract(RangeContract::Beta)?;
    let label = format!("embed[{}]", k.label());
    let constants: Option<Vec<(crate::interval::Interval, f64)>> = k.pieces().and_then(|pieces| {
        pieces
            .iter()
            .map(|p| match p.shape {
                Shape::Constant(c) => Some((p.interval, embed_value(c, slack))),
                Shape::Affine { .. } => None,
            })
            .collect()
    });
    let alpha = match constants {
        Some(steps) => ControlFunction::steps(label, RangeContract::Alpha, &steps)?,
        None => {
            let k = k.clone();
            ControlFunction::from_fallible(label, RangeContract::Alpha, Some(*beta.domain()), move |t| {
                Ok(embed_value(k.eval(t)?, slack))
            })?
        }
    };
    Ok((alpha, beta))
}

/// `G(x) = F(x)` for `x ≠ x0`, `G(x0) = g_x0`.
///
/// Requires `dist(x0, F(x0)) > τ` and `dist(x0, g_x0) − dist(x0, F(x0)) > μ`.
pub fn perturb_at(
    f: &MultivaluedMap,
    x0: &Point,
    g_x0: FiniteClosedSet,
    m: &dyn Metric,
) -> Result<MultivaluedMap> {
    let before = d_f(f, x0, m)?;
    if before <= tau() {
        return Err(Error::Precondition(format!("{x0:?} is a fixed point of {}", f.label())));
    }
    let after = dist_point_set(x0, &g_x0, m)?;
    if after - before <= MU {
        return Err(Error::Precondition(format!(
            "perturbation must increase the distance at {x0:?}: {after} vs {before}"
        )));
    }
    let inner = f.clone();
    let center = x0.clone();
    let label = format!("{}@{:?}", f.label(), x0);
    Ok(MultivaluedMap::new(label, f.domain().clone(), move |x| {
        if x.dim() == center.dim()
            && x.coords().iter().zip(center.coords()).all(|(a, b)| (a - b).abs() <= tau())
        {
            Ok(g_x0.clone())
        } else {
            inner.eval(x)
        }
    }))
}

/// `h(x0) − h(x_j)` at the last point of a sequence approaching `x0`;
/// positive values exhibit a failure of lower semicontinuity.
pub fn lower_semicontinuity_gap<H>(h: H, x0: &Point, approach: &[Point]) -> Result<f64>
where
    H: Fn(&Point) -> Result<f64>,
{
    let last = approach.last().ok_or(Error::EmptySet)?;
    Ok(h(x0)? - h(last)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::metric::AbsDiff;
    use crate::multimap::Domain;

    fn line(points: usize) -> Vec<Point> {
        (0..=points).map(|i| Point::scalar(i as f64 / points as f64)).collect()
    }

    fn contraction() -> MultivaluedMap {
        MultivaluedMap::singlevalued("2x/3", Domain::interval(0.0, 1.0), |x| 2.0 * x / 3.0)
    }

    fn constant(label: &str, contract: RangeContract, c: f64) -> ControlFunction {
        ControlFunction::constant(label, contract, c).unwrap()
    }

    #[test]
    fn singlevalued_contraction_is_ab() {
        let f = contraction();
        let a = constant("1", RangeContract::Alpha, 1.0);
        let b = constant("2/3", RangeContract::Beta, 2.0 / 3.0);
        assert!(check_ab_mapping(&f, &a, &b, &AbsDiff, &line(1000)).unwrap().holds());
        assert!(check_ab_contraction(&f, &a, &b, &AbsDiff, &line(1000)).unwrap().holds());
    }

    #[test]
    fn product_bound_violation() {
        let f = contraction();
        let a = constant("2", RangeContract::Alpha, 2.0);
        let b = constant("1/2", RangeContract::Beta, 0.5);
        let r = check_ab_contraction(&f, &a, &b, &AbsDiff, &line(100)).unwrap();
        assert!(!r.holds());
        assert!(r.witnesses.iter().all(|w| w.margin < 0.0));
        let zero = constant("0", RangeContract::Beta, 0.0);
        let one = constant("1", RangeContract::Alpha, 1.0);
        // β ≡ 0 needs d_F(y) = 0, which fails away from the fixed point
        let r = check_ab_contraction(&f, &one, &zero, &AbsDiff, &line(100)).unwrap();
        assert!(!r.holds());
    }

    #[test]
    fn hausdorff_contraction_singlevalued() {
        let f = contraction();
        let k = constant("k", RangeContract::Beta, 2.0 / 3.0);
        let pts = line(50);
        let pairs: Vec<_> = pts.iter().flat_map(|x| pts.iter().map(move |y| (x.clone(), y.clone()))).collect();
        assert!(check_hausdorff_contraction(&f, &k, &AbsDiff, &pairs).unwrap().holds());
        let tight = constant("k", RangeContract::Beta, 0.6);
        let r = check_hausdorff_contraction(&f, &tight, &AbsDiff, &pairs).unwrap();
        assert!(!r.holds());
        assert_eq!(r.witnesses[0].input.len(), 2);

        let single = MultivaluedMap::new("pt", Domain::Points { points: vec![Point::scalar(0.0)] }, |_| {
            FiniteClosedSet::scalars(&[5.0])
        });
        let pair = [(Point::scalar(0.0), Point::scalar(0.0))];
        assert!(check_hausdorff_contraction(&single, &k, &AbsDiff, &pair).unwrap().holds());
    }

    #[test]
    fn embedding_formula() {
        let half = constant("k", RangeContract::Beta, 0.5);
        let (a, b) = embed_hausdorff(&half, 0.5).unwrap();
        assert_eq!(a.eval(0.3).unwrap(), 1.5);
        assert_eq!(b.eval(0.3).unwrap() * a.eval(0.3).unwrap(), 0.75);
        assert!(a.is_piecewise());

        let zero = constant("k", RangeContract::Beta, 0.0);
        let (a, _) = embed_hausdorff(&zero, 0.5).unwrap();
        assert_eq!(a.eval(1.0).unwrap(), EMBED_CAP);

        let ratio = ControlFunction::from_fn("t/(1+t)", RangeContract::Beta, None, |t| t / (1.0 + t)).unwrap();
        let (a, b) = embed_hausdorff(&ratio, 0.5).unwrap();
        for i in 0..=2000 {
            let t = i as f64 * 1e-3;
            let prod = a.eval(t).unwrap() * b.eval(t).unwrap();
            assert!(prod < 1.0 && a.eval(t).unwrap() > 1.0, "t = {t}");
        }
        assert!(embed_hausdorff(&half, 1.0).is_err());
    }

    #[test]
    fn perturbation() {
        let f = contraction();
        let x0 = Point::scalar(0.5);
        let g = perturb_at(&f, &x0, FiniteClosedSet::scalars(&[0.0]).unwrap(), &AbsDiff).unwrap();
        assert_eq!(d_f(&g, &x0, &AbsDiff).unwrap(), 0.5);
        let differing = line(1000)
            .into_iter()
            .filter(|x| f.eval(x).unwrap() != g.eval(x).unwrap())
            .count();
        assert_eq!(differing, 1);
        let same = f.eval(&x0).unwrap();
        assert!(matches!(perturb_at(&f, &x0, same, &AbsDiff), Err(Error::Precondition(_))));
        assert!(perturb_at(&f, &Point::scalar(0.0), FiniteClosedSet::scalars(&[1.0]).unwrap(), &AbsDiff).is_err());

        let approach: Vec<Point> = (1..=30).map(|j| Point::scalar(0.5 + 0.1 * 0.5_f64.powi(j))).collect();
        let gap = lower_semicontinuity_gap(|x| d_f(&g, x, &AbsDiff), &x0, &approach).unwrap();
        assert!((gap - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn piecewise_k_embeds_piecewise() {
        let k = ControlFunction::steps(
            "k",
            RangeContract::Beta,
            &[(Interval::closed(0.0, 1.0), 0.5), (Interval::above(1.0), 0.25)],
        )
        .unwrap();
        let (a, _) = embed_hausdorff(&k, 0.5).unwrap();
        assert!(a.is_piecewise());
        assert_eq!(a.eval(2.0).unwrap(), 1.0 + 0.5 * 0.75 / 0.25);
    }
}
