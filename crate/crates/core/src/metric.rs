//! Points, metrics, finite closed sets and the distances built on them.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tolerance::tau;

/// A point of ℝ^d with finite coordinates.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension { expected: 1, got: 0 });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coords })
    }

    /// A point of the real line.
    ///
    /// Panics if `x` is not finite.
    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite scalar point {x}");
        Self { coords: vec![x] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// First coordinate; the value of a point of ℝ.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    /// Lexicographic order on coordinates.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.coords.len().cmp(&other.coords.len())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0])
        } else {
            write!(f, "{:?}", self.coords)
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.coords.len() == 1 {
            serializer.serialize_f64(self.coords[0])
        } else {
            self.coords.serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Scalar(f64),
            Vector(Vec<f64>),
        }
        let coords = match Repr::deserialize(deserializer)? {
            Repr::Scalar(x) => vec![x],
            Repr::Vector(v) => v,
        };
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

/// A distance on ℝ^d.
pub trait Metric: Send + Sync {
    fn distance(&self, a: &Point, b: &Point) -> f64;

    fn name(&self) -> &str;
}

/// Euclidean distance.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl Metric for Euclidean {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        a.coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    fn name(&self) -> &str {
        "euclidean"
    }
}

/// `|x - y|` on the real line.
#[derive(Clone, Copy, Debug, Default)]
pub struct AbsDiff;

impl Metric for AbsDiff {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        (a.x() - b.x()).abs()
    }

    fn name(&self) -> &str {
        "abs"
    }
}

type DistanceFn = dyn Fn(&Point, &Point) -> f64 + Send + Sync;

/// A user-supplied metric. Only obtainable through [`FnMetric::validated`].
#[derive(Clone)]
pub struct FnMetric {
    name: String,
    eval: Arc<DistanceFn>,
}

impl FnMetric {
    /// Wraps `eval` after it passes [`check_metric_axioms`] on `samples`.
    pub fn validated(
        name: impl Into<String>,
        eval: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
        samples: &[Point],
    ) -> Result<Self> {
        let metric = Self {
            name: name.into(),
            eval: Arc::new(eval),
        };
        check_metric_axioms(&metric, samples)?;
        Ok(metric)
    }
}

impl Metric for FnMetric {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        (self.eval)(a, b)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// Checks identity, nonnegativity, symmetry and the triangle inequality on
/// every sampled pair and triple, each within `τ`.
pub fn check_metric_axioms(metric: &dyn Metric, samples: &[Point]) -> Result<()> {
    let tol = tau();
    for x in samples {
        let dxx = metric.distance(x, x);
        if dxx.abs() > tol {
            return Err(Error::MetricAxiom(format!("d({x:?}, {x:?}) = {dxx}")));
        }
    }
    for x in samples {
        for y in samples {
            let dxy = metric.distance(x, y);
            if !dxy.is_finite() || dxy < -tol {
                return Err(Error::MetricAxiom(format!("d({x:?}, {y:?}) = {dxy}")));
            }
            let dyx = metric.distance(y, x);
            if (dxy - dyx).abs() > tol {
                return Err(Error::MetricAxiom(format!(
                    "asymmetric at ({x:?}, {y:?}): {dxy} vs {dyx}"
                )));
            }
            for z in samples {
                let dxz = metric.distance(x, z);
                let dyz = metric.distance(y, z);
                if dxz > dxy + dyz + tol {
                    return Err(Error::MetricAxiom(format!(
                        "triangle inequality fails on ({x:?}, {y:?}, {z:?})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A nonempty finite set of points, sorted lexicographically, with no two
/// points within `τ` of each other (Euclidean).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FiniteClosedSet {
    points: Vec<Point>,
}

impl FiniteClosedSet {
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: bad.dim(),
            });
        }
        points.sort_by(Point::lex_cmp);
        let tol = tau();
        let mut kept: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if !kept.iter().any(|k| Euclidean.distance(k, &p) <= tol) {
                kept.push(p);
            }
        }
        Ok(Self { points: kept })
    }

    pub fn singleton(p: Point) -> Self {
        Self { points: vec![p] }
    }

    /// Set of scalar points.
    pub fn scalars(values: &[f64]) -> Result<Self> {
        let points = values
            .iter()
            .map(|&v| Point::new(vec![v]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Membership up to `τ` under `m`.
    pub fn contains(&self, x: &Point, m: &dyn Metric) -> bool {
        self.points.iter().any(|p| m.distance(p, x) <= tau())
    }

    /// `self ∪ other`, re-deduplicated.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Self::new(points)
    }
}

impl<'de> Deserialize<'de> for FiniteClosedSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<Point>::deserialize(deserializer)?;
        FiniteClosedSet::new(points).map_err(serde::de::Error::custom)
    }
}

/// `dist(x, A) = min_{a ∈ A} d(x, a)`.
pub fn dist_point_set(x: &Point, set: &FiniteClosedSet, m: &dyn Metric) -> Result<f64> {
    set.points
        .iter()
        .map(|a| m.distance(x, a))
        .min_by(f64::total_cmp)
        .ok_or(Error::EmptySet)
}

/// `sup_{a ∈ A} dist(a, B)`.
pub fn directed_hausdorff(a: &FiniteClosedSet, b: &FiniteClosedSet, m: &dyn Metric) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut sup = 0.0_f64;
    for p in &a.points {
        sup = sup.max(dist_point_set(p, b, m)?);
    }
    Ok(sup)
}

/// Hausdorff distance between two finite sets.
pub fn hausdorff(a: &FiniteClosedSet, b: &FiniteClosedSet, m: &dyn Metric) -> Result<f64> {
    Ok(directed_hausdorff(a, b, m)?.max(directed_hausdorff(b, a, m)?))
}

/// How [`neighborhood_inf`] samples the ball around its center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborhoodSampling {
    /// Axis-aligned lattice `x + step·k` restricted to the ball.
    Grid { step: f64 },
    /// Explicit candidates; those outside the ball are ignored.
    Points(Vec<Point>),
}

/// Ball test used by the neighborhood samplers: closed, widened by `τ`.
fn in_ball(center: &Point, p: &Point, r: f64, m: &dyn Metric) -> bool {
    m.distance(center, p) <= r + tau()
}

/// Candidate points for the ball `O_r(x)` under `sampling`, `x` first.
pub fn neighborhood_points(
    x: &Point,
    r: f64,
    sampling: &NeighborhoodSampling,
    m: &dyn Metric,
) -> Result<Vec<Point>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let mut out = vec![x.clone()];
    match sampling {
        NeighborhoodSampling::Grid { step } => {
            if !(*step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidParameter(format!("grid step must be positive, got {step}")));
            }
            let n = (r / step + 1e-9).floor() as i64;
            let dim = x.dim();
            let side = (2 * n + 1) as usize;
            let total = side.checked_pow(dim as u32).ok_or_else(|| {
                Error::InvalidParameter("neighborhood lattice too large".into())
            })?;
            let mut offsets = vec![-n; dim];
            for _ in 0..total {
                if offsets.iter().any(|&k| k != 0) {
                    let coords: Vec<f64> = x
                        .coords
                        .iter()
                        .zip(&offsets)
                        .map(|(c, &k)| c + step * k as f64)
                        .collect();
                    let p = Point::new(coords)?;
                    if in_ball(x, &p, r, m) {
                        out.push(p);
                    }
                }
                for k in offsets.iter_mut() {
                    *k += 1;
                    if *k <= n {
                        break;
                    }
                    *k = -n;
                }
            }
        }
        NeighborhoodSampling::Points(points) => {
            if points.is_empty() {
                return Err(Error::EmptySet);
            }
            out.extend(points.iter().filter(|p| in_ball(x, p, r, m)).cloned());
        }
    }
    Ok(out)
}

/// Minimum of `h` over a sample of the ball of radius `r` around `x`,
/// the center included.
pub fn neighborhood_inf<H>(
    h: H,
    x: &Point,
    r: f64,
    sampling: &NeighborhoodSampling,
    m: &dyn Metric,
) -> Result<f64>
where
    H: Fn(&Point) -> Result<f64>,
{
    let mut inf = f64::INFINITY;
    for p in neighborhood_points(x, r, sampling, m)? {
        inf = inf.min(h(&p)?);
    }
    Ok(inf)
}
