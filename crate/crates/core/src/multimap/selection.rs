//! The step-selection oracle: find `y ∈ F(x)` with
//! (A) `d(x,y) ≤ α(d(x,y))·d_F(x)` and (B) `d_F(y) ≤ β(d(x,y))·d(x,y)`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::map::MultivaluedMap;
use crate::control::ControlFunction;
use crate::error::{Error, Result};
use crate::metric::{dist_point_set, Metric, Point};
use crate::tolerance::tau;

/// One evaluated candidate `(x, y)` with the slack of (A) and (B).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub x: Point,
    pub y: Point,
    pub d_xy: f64,
    #[serde(rename = "d_F_x")]
    pub d_f_x: f64,
    #[serde(rename = "d_F_y")]
    pub d_f_y: f64,
    /// `α(d)·d_F(x) − d`
    #[serde(rename = "condition_A_margin")]
    pub margin_a: f64,
    /// `β(d)·d − d_F(y)`
    #[serde(rename = "condition_B_margin")]
    pub margin_b: f64,
}

impl SelectionRecord {
    pub fn worst_margin(&self) -> f64 {
        self.margin_a.min(self.margin_b)
    }

    pub fn accepted(&self) -> bool {
        self.worst_margin() >= -tau()
    }
}

fn evaluate(
    f: &MultivaluedMap,
    x: &Point,
    y: &Point,
    d_f_x: f64,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
) -> Result<SelectionRecord> {
    let d = m.distance(x, y);
    let d_f_y = dist_point_set(y, &f.eval(y)?, m)?;
    Ok(SelectionRecord {
        x: x.clone(),
        y: y.clone(),
        d_xy: d,
        d_f_x,
        d_f_y,
        margin_a: alpha.eval(d)? * d_f_x - d,
        margin_b: beta.eval(d)? * d - d_f_y,
    })
}

/// Candidate order: smaller `d(x,y)` first (ties within `τ`), then
/// lexicographic in `y`.
fn by_distance_then_lex(a: &SelectionRecord, b: &SelectionRecord) -> Ordering {
    if (a.d_xy - b.d_xy).abs() <= tau() {
        a.y.lex_cmp(&b.y)
    } else {
        a.d_xy.total_cmp(&b.d_xy)
    }
}

/// Every candidate `y ∈ F(x)` with its margins, in selection order.
pub fn candidates(
    f: &MultivaluedMap,
    x: &Point,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
) -> Result<Vec<SelectionRecord>> {
    let image = f.eval(x)?;
    let d_f_x = dist_point_set(x, &image, m)?;
    let mut out = image
        .points()
        .iter()
        .map(|y| evaluate(f, x, y, d_f_x, alpha, beta, m))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(by_distance_then_lex);
    Ok(out)
}

/// Picks the admissible `y` closest to `x`.
///
/// When `d_F(x) ≤ τ` the nearest image point is returned without testing
/// (A)/(B). Otherwise the error carries the candidate with the largest
/// worst-case margin.
pub fn select_step(
    f: &MultivaluedMap,
    x: &Point,
    alpha: &ControlFunction,
    beta: &ControlFunction,
    m: &dyn Metric,
) -> Result<SelectionRecord> {
    let all = candidates(f, x, alpha, beta, m)?;
    if all[0].d_f_x <= tau() {
        return Ok(all.into_iter().next().expect("nonempty image"));
    }
    if let Some(pos) = all.iter().position(SelectionRecord::accepted) {
        return Ok(all.into_iter().nth(pos).expect("index in range"));
    }
    let near_miss = all
        .into_iter()
        .max_by(|a, b| a.worst_margin().total_cmp(&b.worst_margin()))
        .expect("nonempty image");
    Err(Error::NotAbMapping {
        near_miss: Box::new(near_miss),
    })
}
