//! Piecewise constant/affine descriptors and their exact extrema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::sampling::sorted_unique;
use crate::tolerance::tau;

/// Shape of a function on one piece.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeRepr", into = "ShapeRepr")]
pub enum Shape {
    Constant(f64),
    /// `slope·t + intercept`
    Affine { slope: f64, intercept: f64 },
}

impl Shape {
    pub fn affine(slope: f64, intercept: f64) -> Self {
        if slope == 0.0 {
            Shape::Constant(intercept)
        } else {
            Shape::Affine { slope, intercept }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Shape::Constant(c) => c,
            Shape::Affine { slope, intercept } => slope * t + intercept,
        }
    }

    /// Sup and inf over the closure of `iv` (limits at open or infinite ends).
    fn extrema(&self, iv: &Interval) -> (f64, f64) {
        match *self {
            Shape::Constant(c) => (c, c),
            Shape::Affine { .. } => {
                let (a, b) = (self.eval(iv.lo), self.eval(iv.hi));
                (a.max(b), a.min(b))
            }
        }
    }

    pub fn mul(&self, other: &Shape) -> Option<Shape> {
        match (*self, *other) {
            (Shape::Constant(a), Shape::Constant(b)) => Some(Shape::Constant(a * b)),
            (Shape::Constant(c), Shape::Affine { slope, intercept })
            | (Shape::Affine { slope, intercept }, Shape::Constant(c)) => {
                Some(Shape::affine(c * slope, c * intercept))
            }
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ShapeRepr {
    kind: String,
    params: Vec<f64>,
}

impl TryFrom<ShapeRepr> for Shape {
    type Error = String;

    fn try_from(r: ShapeRepr) -> std::result::Result<Self, String> {
        if r.params.iter().any(|p| !p.is_finite()) {
            return Err("non-finite shape parameter".into());
        }
        match (r.kind.as_str(), r.params.as_slice()) {
            ("constant", [c]) => Ok(Shape::Constant(*c)),
            ("affine", [a, b]) => Ok(Shape::affine(*a, *b)),
            (kind, params) => Err(format!(
                "unknown shape {kind} with {} parameters",
                params.len()
            )),
        }
    }
}

impl From<Shape> for ShapeRepr {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Constant(c) => ShapeRepr {
                kind: "constant".into(),
                params: vec![c],
            },
            Shape::Affine { slope, intercept } => ShapeRepr {
                kind: "affine".into(),
                params: vec![slope, intercept],
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(flatten)]
    pub interval: Interval,
    pub shape: Shape,
}

impl Piece {
    pub fn new(interval: Interval, shape: Shape) -> Self {
        Self { interval, shape }
    }

    pub fn constant(interval: Interval, c: f64) -> Self {
        Self::new(interval, Shape::Constant(c))
    }
}

/// Checks that `pieces` partition an interval and returns it.
pub(crate) fn partition_domain(label: &str, pieces: &[Piece]) -> Result<Interval> {
    let bad = |reason: String| Error::Pieces {
        label: label.to_string(),
        reason,
    };
    let (first, last) = match (pieces.first(), pieces.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(bad("no pieces".into())),
    };
    let tol = tau();
    for (i, p) in pieces.iter().enumerate() {
        if p.interval.is_empty() || p.interval.lo.is_nan() || p.interval.hi.is_nan() {
            return Err(bad(format!("piece {i} is empty: {}", p.interval)));
        }
    }
    for (i, w) in pieces.windows(2).enumerate() {
        let (a, b) = (&w[0].interval, &w[1].interval);
        if (a.hi - b.lo).abs() > tol {
            return Err(bad(format!("gap or overlap between pieces {i} and {}", i + 1)));
        }
        if a.hi_closed == b.lo_closed {
            return Err(bad(format!(
                "breakpoint {} must belong to exactly one of pieces {i}, {}",
                a.hi,
                i + 1
            )));
        }
    }
    Ok(Interval::new(
        first.interval.lo,
        first.interval.lo_closed,
        last.interval.hi,
        last.interval.hi_closed,
    ))
}

pub(crate) fn locate(pieces: &[Piece], t: f64) -> Option<&Piece> {
    pieces.iter().find(|p| p.interval.contains(t))
}

/// Exact sup of the pieces over `query` (open ends contribute their limits).
pub(crate) fn sup_over(pieces: &[Piece], query: &Interval) -> Option<f64> {
    pieces
        .iter()
        .filter_map(|p| p.interval.intersect(query).map(|iv| p.shape.extrema(&iv).0))
        .reduce(f64::max)
}

/// Exact inf of the pieces over `query`.
pub(crate) fn inf_over(pieces: &[Piece], query: &Interval) -> Option<f64> {
    pieces
        .iter()
        .filter_map(|p| p.interval.intersect(query).map(|iv| p.shape.extrema(&iv).1))
        .reduce(f64::min)
}

pub(crate) fn breakpoints(pieces: &[Piece]) -> Vec<f64> {
    sorted_unique(
        pieces
            .iter()
            .flat_map(|p| p.interval.finite_endpoints())
            .collect(),
    )
}

/// Merges neighbouring pieces carrying equal shapes.
pub(crate) fn normalize(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.shape == p.shape {
                last.interval.hi = p.interval.hi;
                last.interval.hi_closed = p.interval.hi_closed;
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// Elementary cells of the common refinement of two partitions over `domain`.
fn refine(a: &[Piece], b: &[Piece], domain: &Interval) -> Vec<Interval> {
    let mut cuts: Vec<f64> = breakpoints(a);
    cuts.extend(breakpoints(b));
    let tol = tau();
    let inner: Vec<f64> = sorted_unique(cuts)
        .into_iter()
        .filter(|&c| c > domain.lo + tol && c < domain.hi - tol)
        .collect();
    let mut cells = Vec::new();
    if domain.lo_closed {
        cells.push(Interval::point(domain.lo));
    }
    let mut left = domain.lo;
    for &c in &inner {
        cells.push(Interval::open(left, c));
        cells.push(Interval::point(c));
        left = c;
    }
    if domain.is_degenerate() {
        return cells;
    }
    cells.push(Interval::open(left, domain.hi));
    if domain.hi_closed {
        cells.push(Interval::point(domain.hi));
    }
    cells
}

fn cell_probe(cell: &Interval) -> f64 {
    match (cell.lo.is_finite(), cell.hi.is_finite()) {
        _ if cell.is_degenerate() => cell.lo,
        (true, true) => 0.5 * (cell.lo + cell.hi),
        (true, false) => cell.lo + 1.0,
        (false, true) => cell.hi - 1.0,
        (false, false) => 0.0,
    }
}

/// Pointwise combination of two piecewise functions on the intersection of
/// their domains; `None` when some cell cannot be represented.
pub(crate) fn combine(
    a: &[Piece],
    b: &[Piece],
    domain: &Interval,
    op: impl Fn(&Shape, &Shape) -> Option<Shape>,
) -> Option<Vec<Piece>> {
    let mut out = Vec::new();
    for cell in refine(a, b, domain) {
        let t = cell_probe(&cell);
        let sa = locate(a, t)?;
        let sb = locate(b, t)?;
        out.push(Piece::new(cell, op(&sa.shape, &sb.shape)?));
    }
    Some(normalize(out))
}

/// Transforms each piece's shape; `None` when some shape cannot be mapped.
pub(crate) fn map_shapes(
    pieces: &[Piece],
    f: impl Fn(&Piece) -> Option<Result<Shape>>,
) -> Option<Result<Vec<Piece>>> {
    let mut out = Vec::with_capacity(pieces.len());
    for p in pieces {
        match f(p)? {
            Ok(shape) => out.push(Piece::new(p.interval, shape)),
            Err(e) => return Some(Err(e)),
        }
    }
    Some(Ok(normalize(out)))
}
