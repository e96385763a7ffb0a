//! Real intervals with explicit endpoint ownership.

use serde::{Deserialize, Serialize};

use crate::tolerance::tau;

/// An interval of ℝ. Infinite endpoints are always open.
///
/// Membership snaps to endpoints: an argument within `τ` of an endpoint is
/// treated as that endpoint, so `1 - 2/3` lands on a breakpoint at `1/3` even
/// though the two doubles differ in the last bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, true, hi, true)
    }

    /// `(lo, hi)`
    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, false, hi, false)
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, true, hi, false)
    }

    /// `(lo, hi]`
    pub fn open_closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, false, hi, true)
    }

    /// `[c, c]`
    pub fn point(c: f64) -> Self {
        Self::closed(c, c)
    }

    /// `[lo, ∞)`
    pub fn from(lo: f64) -> Self {
        Self::new(lo, true, f64::INFINITY, false)
    }

    /// `(lo, ∞)`
    pub fn above(lo: f64) -> Self {
        Self::new(lo, false, f64::INFINITY, false)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = tau();
        if (t - self.lo).abs() <= tol {
            return self.lo_closed;
        }
        if (t - self.hi).abs() <= tol {
            return self.hi_closed;
        }
        t > self.lo && t < self.hi
    }

    /// Intersection, or `None` when empty (up to `τ`).
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let tol = tau();
        let (lo, lo_closed) = if (self.lo - other.lo).abs() <= tol {
            (self.lo.max(other.lo), self.lo_closed && other.lo_closed)
        } else if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else {
            (other.lo, other.lo_closed)
        };
        let (hi, hi_closed) = if (self.hi - other.hi).abs() <= tol {
            (self.hi.min(other.hi), self.hi_closed && other.hi_closed)
        } else if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else {
            (other.hi, other.hi_closed)
        };
        if hi - lo > tol {
            Some(Interval::new(lo, lo_closed, hi, hi_closed))
        } else if (hi - lo).abs() <= tol && lo_closed && hi_closed {
            Some(Interval::point(lo))
        } else {
            None
        }
    }

    /// Finite endpoints.
    pub fn finite_endpoints(&self) -> impl Iterator<Item = f64> {
        [self.lo, self.hi].into_iter().filter(|v| v.is_finite())
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Wire form: `null` stands for an infinite endpoint.
#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Option<f64>,
    hi: Option<f64>,
    #[serde(default = "yes")]
    lo_closed: bool,
    #[serde(default)]
    hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl From<IntervalRepr> for Interval {
    fn from(r: IntervalRepr) -> Self {
        Interval::new(
            r.lo.unwrap_or(f64::NEG_INFINITY),
            r.lo_closed,
            r.hi.unwrap_or(f64::INFINITY),
            r.hi_closed,
        )
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        Self {
            lo: i.lo.is_finite().then_some(i.lo),
            hi: i.hi.is_finite().then_some(i.hi),
            lo_closed: i.lo_closed,
            hi_closed: i.hi_closed,
        }
    }
}
