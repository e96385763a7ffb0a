//! Finite-valued mappings and their JSON descriptions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::control::{Piece, Shape};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metric::{dist_point_set, FiniteClosedSet, Metric, Point};
use crate::tolerance::tau;

/// Where a map is defined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Closed box `∏ [lo_i, hi_i]`; bounds may be infinite.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// An explicit finite set of points.
    Points { points: Vec<Point> },
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Domain::Box {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn real_line() -> Self {
        Self::interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Points { points } => points.first().map_or(0, Point::dim),
        }
    }

    /// Membership up to `τ` (Euclidean for point lists).
    pub fn contains(&self, x: &Point) -> bool {
        let tol = tau();
        match self {
            Domain::Box { lo, hi } => {
                x.dim() == lo.len()
                    && x.coords()
                        .iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(c, (l, h))| *c >= l - tol && *c <= h + tol)
            }
            Domain::Points { points } => points.iter().any(|p| {
                p.dim() == x.dim()
                    && p.coords()
                        .iter()
                        .zip(x.coords())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        <= tol
            }),
        }
    }

    /// A uniform sample with `per_axis` points per finite axis. Point-list
    /// domains return their points.
    pub fn grid(&self, per_axis: usize) -> Result<Vec<Point>> {
        match self {
            Domain::Points { points } => Ok(points.clone()),
            Domain::Box { lo, hi } => {
                if lo.iter().chain(hi).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("cannot grid an unbounded box".into()));
                }
                let n = per_axis.max(2);
                let mut out = vec![Vec::new()];
                for (l, h) in lo.iter().zip(hi) {
                    let axis: Vec<f64> = (0..n).map(|i| l + (h - l) * i as f64 / (n - 1) as f64).collect();
                    out = out
                        .into_iter()
                        .flat_map(|prefix: Vec<f64>| {
                            axis.iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(*v);
                                p
                            })
                        })
                        .collect();
                }
                out.into_iter().map(Point::new).collect()
            }
        }
    }
}

/// One image expression of a 1-D branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImageExpr {
    Constant { c: f64 },
    /// `a·x + b`
    Linear { a: f64, b: f64 },
}

impl ImageExpr {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ImageExpr::Constant { c } => c,
            ImageExpr::Linear { a, b } => a * x + b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    #[serde(flatten)]
    pub interval: Interval,
    pub images: Vec<ImageExpr>,
}

impl Branch {
    pub fn new(interval: Interval, images: Vec<ImageExpr>) -> Self {
        Self { interval, images }
    }
}

/// Serializable map description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    /// `F(x) = {e(x) : e ∈ images}` on the branch containing `x`.
    #[serde(rename = "piecewise-1d")]
    Piecewise1d { branches: Vec<Branch> },
    /// Explicit `x ↦ F(x)` pairs.
    Table { entries: Vec<(Point, Vec<Point>)> },
}

/// JSON file format for maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub label: String,
    #[serde(flatten)]
    pub spec: MapSpec,
}

type EvalFn = dyn Fn(&Point) -> Result<FiniteClosedSet> + Send + Sync;

/// `x ↦ F(x)` with finite nonempty values.
#[derive(Clone)]
pub struct MultivaluedMap {
    label: String,
    domain: Domain,
    eval: Arc<EvalFn>,
    spec: Option<MapSpec>,
}

impl fmt::Debug for MultivaluedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultivaluedMap")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

impl MultivaluedMap {
    pub fn new<F>(label: impl Into<String>, domain: Domain, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<FiniteClosedSet> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            domain,
            eval: Arc::new(eval),
            spec: None,
        }
    }

    /// Singlevalued `x ↦ {f(x)}` on an interval of the line.
    pub fn singlevalued<F>(label: impl Into<String>, domain: Domain, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, domain, move |x| Ok(FiniteClosedSet::singleton(Point::new(vec![f(x.x())])?)))
    }

    pub fn from_spec(label: impl Into<String>, spec: MapSpec) -> Result<Self> {
        let label = label.into();
        let (domain, eval): (Domain, Arc<EvalFn>) = match &spec {
            MapSpec::Piecewise1d { branches } => {
                let probes: Vec<Piece> = branches
                    .iter()
                    .map(|b| Piece::new(b.interval, Shape::Constant(0.0)))
                    .collect();
                let whole = crate::control::partition_domain(&label, &probes)?;
                if let Some(b) = branches.iter().find(|b| b.images.is_empty()) {
                    return Err(Error::Pieces {
                        label: label.clone(),
                        reason: format!("branch {} has no images", b.interval),
                    });
                }
                let branches = branches.clone();
                let name = label.clone();
                (
                    Domain::interval(whole.lo, whole.hi),
                    Arc::new(move |x: &Point| {
                        let t = x.x();
                        let branch = branches
                            .iter()
                            .find(|b| b.interval.contains(t))
                            .ok_or_else(|| Error::OutOfDomain {
                                label: name.clone(),
                                point: x.coords().to_vec(),
                            })?;
                        let pts = branch
                            .images
                            .iter()
                            .map(|e| Point::new(vec![e.eval(t)]))
                            .collect::<Result<Vec<_>>>()?;
                        FiniteClosedSet::new(pts)
                    }),
                )
            }
            MapSpec::Table { entries } => {
                if entries.is_empty() {
                    return Err(Error::EmptySet);
                }
                let table = entries
                    .iter()
                    .map(|(x, img)| Ok((x.clone(), FiniteClosedSet::new(img.clone())?)))
                    .collect::<Result<Vec<_>>>()?;
                let domain = Domain::Points {
                    points: entries.iter().map(|(x, _)| x.clone()).collect(),
                };
                let name = label.clone();
                (
                    domain,
                    Arc::new(move |x: &Point| {
                        table
                            .iter()
                            .find(|(p, _)| Domain::Points { points: vec![p.clone()] }.contains(x))
                            .map(|(_, img)| img.clone())
                            .ok_or_else(|| Error::OutOfDomain {
                                label: name.clone(),
                                point: x.coords().to_vec(),
                            })
                    }),
                )
            }
        };
        Ok(Self {
            label,
            domain,
            eval,
            spec: Some(spec),
        })
    }

    pub fn from_json(json: MapJson) -> Result<Self> {
        Self::from_spec(json.label, json.spec)
    }

    pub fn to_json(&self) -> Result<MapJson> {
        let spec = self
            .spec
            .clone()
            .ok_or_else(|| Error::NotSerializable(self.label.clone()))?;
        Ok(MapJson {
            label: self.label.clone(),
            spec,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn spec(&self) -> Option<&MapSpec> {
        self.spec.as_ref()
    }

    pub fn eval(&self, x: &Point) -> Result<FiniteClosedSet> {
        if !self.domain.contains(x) {
            return Err(Error::OutOfDomain {
                label: self.label.clone(),
                point: x.coords().to_vec(),
            });
        }
        (self.eval)(x)
    }
}

/// `d_F(x) = dist(x, F(x))`.
pub fn d_f(f: &MultivaluedMap, x: &Point, m: &dyn Metric) -> Result<f64> {
    dist_point_set(x, &f.eval(x)?, m)
}
