//! One-dimensional sampling grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::tau;

/// Default `[0, 2]` grid step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default right-window length for the lim sup checks.
pub const DEFAULT_WINDOW: f64 = 0.1;

/// Uniform grid `lo, lo + step, …, hi` plus extra points (typically
/// breakpoints), sorted and deduplicated under `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::new(0.0, 2.0, DEFAULT_STEP)
    }
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self {
            lo,
            hi,
            step,
            extra: Vec::new(),
        }
    }

    pub fn with_extra(mut self, extra: impl IntoIterator<Item = f64>) -> Self {
        self.extra.extend(extra);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds [{}, {}]",
                self.lo, self.hi
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid step {}", self.step)));
        }
        if self.extra.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite extra grid point".into()));
        }
        Ok(())
    }

    /// All grid points in increasing order.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|i| self.lo + self.step * i as f64).collect();
        if let Some(last) = pts.last_mut() {
            if (self.hi - *last).abs() <= 1e-9 * self.step {
                *last = self.hi;
            }
        }
        pts.extend(self.extra.iter().copied());
        sorted_unique(pts)
    }
}

/// Sorts and merges values closer than `τ`.
pub fn sorted_unique(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let tol = tau();
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        match out.last() {
            Some(&last) if (v - last).abs() <= tol => {}
            _ => out.push(v),
        }
    }
    out
}

/// Points `t + w·2^{-j}`, `j = 1..=depth`, approaching `t` from the right.
pub fn right_approach(t: f64, w: f64, depth: u32) -> impl Iterator<Item = f64> {
    (1..=depth).map(move |j| t + w * 0.5_f64.powi(j as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_2001_points() {
        let pts = GridSpec::default().points();
        assert_eq!(pts.len(), 2001);
        assert_eq!(pts[0], 0.0);
        assert_eq!(*pts.last().unwrap(), 2.0);
    }

    #[test]
    fn extras_are_merged() {
        let g = GridSpec::new(0.0, 1.0, 0.25).with_extra([1.0 / 3.0, 0.5 + 1e-14]);
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_grid() {
        assert!(GridSpec::new(1.0, 0.0, 0.1).validate().is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0).validate().is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.1).validate().is_ok());
    }
}
