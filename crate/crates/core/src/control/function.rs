use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::piecewise::{self, Piece, Shape};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::sampling::{right_approach, sorted_unique};
use crate::tolerance::tau;

/// Declared range of a control function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeContract {
    /// `[0,∞) → [1,∞)`
    Alpha,
    /// `[0,∞) → [0,1)`
    Beta,
    /// `(0,1] → [0,∞)`
    Gamma,
    /// Any finite real.
    Generic,
}

impl RangeContract {
    pub fn default_domain(self) -> Option<Interval> {
        match self {
            RangeContract::Alpha | RangeContract::Beta => Some(Interval::from(0.0)),
            RangeContract::Gamma => Some(Interval::open_closed(0.0, 1.0)),
            RangeContract::Generic => None,
        }
    }

    pub fn admits(self, v: f64) -> bool {
        let tol = tau();
        match self {
            RangeContract::Alpha => v.is_finite() && v >= 1.0 - tol,
            RangeContract::Beta => v >= -tol && v < 1.0,
            RangeContract::Gamma => v.is_finite() && v >= -tol,
            RangeContract::Generic => v.is_finite(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            RangeContract::Alpha => "alpha: [1,∞)",
            RangeContract::Beta => "beta: [0,1)",
            RangeContract::Gamma => "gamma: [0,∞)",
            RangeContract::Generic => "generic",
        }
    }
}

type Eval = dyn Fn(f64) -> Result<f64> + Send + Sync;

#[derive(Clone)]
enum Repr {
    Pieces(Vec<Piece>),
    Closure(Arc<Eval>),
}

/// A numerical function on an interval of `[0,∞)`, either given by
/// constant/affine pieces (which allows exact extrema) or by a closure.
#[derive(Clone)]
pub struct ControlFunction {
    label: String,
    contract: RangeContract,
    domain: Interval,
    repr: Repr,
}

impl fmt::Debug for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("ControlFunction");
        s.field("label", &self.label)
            .field("contract", &self.contract)
            .field("domain", &self.domain);
        match &self.repr {
            Repr::Pieces(p) => s.field("pieces", p),
            Repr::Closure(_) => s.field("pieces", &"<closure>"),
        };
        s.finish()
    }
}

impl ControlFunction {
    /// Piecewise function; the pieces must partition their union.
    pub fn piecewise(
        label: impl Into<String>,
        contract: RangeContract,
        pieces: Vec<Piece>,
    ) -> Result<Self> {
        let label = label.into();
        let domain = piecewise::partition_domain(&label, &pieces)?;
        let f = Self {
            label,
            contract,
            domain,
            repr: Repr::Pieces(pieces),
        };
        f.enforce_contract()?;
        Ok(f)
    }

    /// Step function from `(interval, value)` pairs.
    pub fn steps(
        label: impl Into<String>,
        contract: RangeContract,
        steps: &[(Interval, f64)],
    ) -> Result<Self> {
        let pieces = steps.iter().map(|&(iv, c)| Piece::constant(iv, c)).collect();
        Self::piecewise(label, contract, pieces)
    }

    /// Constant on the contract's default domain (`[0,∞)` for generic).
    pub fn constant(label: impl Into<String>, contract: RangeContract, c: f64) -> Result<Self> {
        let domain = contract.default_domain().unwrap_or(Interval::from(0.0));
        Self::piecewise(label, contract, vec![Piece::constant(domain, c)])
    }

    /// Closure-backed function on `domain` (the contract's default when `None`).
    pub fn from_fn(
        label: impl Into<String>,
        contract: RangeContract,
        domain: Option<Interval>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::from_fallible(label, contract, domain, move |t| Ok(f(t)))
    }

    /// Like [`ControlFunction::from_fn`] for closures that can fail, e.g.
    /// by evaluating another function outside its domain.
    pub fn from_fallible(
        label: impl Into<String>,
        contract: RangeContract,
        domain: Option<Interval>,
        f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let label = label.into();
        let domain = domain
            .or_else(|| contract.default_domain())
            .ok_or_else(|| Error::InvalidParameter(format!("{label}: generic function needs a domain")))?;
        let f = Self {
            label,
            contract,
            domain,
            repr: Repr::Closure(Arc::new(f)),
        };
        f.enforce_contract()?;
        Ok(f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn contract(&self) -> RangeContract {
        self.contract
    }

    /// Re-declares the range contract, enforcing it.
    pub fn with_contract(mut self, contract: RangeContract) -> Result<Self> {
        self.contract = contract;
        self.enforce_contract()?;
        Ok(self)
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn pieces(&self) -> Option<&[Piece]> {
        match &self.repr {
            Repr::Pieces(p) => Some(p),
            Repr::Closure(_) => None,
        }
    }

    pub fn is_piecewise(&self) -> bool {
        self.pieces().is_some()
    }

    /// Finite piece endpoints (empty for closures).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces().map(piecewise::breakpoints).unwrap_or_default()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.domain.contains(t) {
            return Err(Error::OutOfDomain {
                label: self.label.clone(),
                point: vec![t],
            });
        }
        match &self.repr {
            Repr::Pieces(p) => piecewise::locate(p, t)
                .map(|piece| piece.shape.eval(t))
                .ok_or_else(|| Error::OutOfDomain {
                    label: self.label.clone(),
                    point: vec![t],
                }),
            Repr::Closure(f) => f(t),
        }
    }

    /// Evaluates the defining formula without the domain check; `NaN` when
    /// no formula applies.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Pieces(p) => piecewise::locate(p, t)
                .map(|piece| piece.shape.eval(t))
                .unwrap_or(f64::NAN),
            Repr::Closure(f) => f(t).unwrap_or(f64::NAN),
        }
    }

    /// Exact sup over `query ∩ domain` for piecewise functions; `None` for
    /// closures or an empty intersection.
    pub fn exact_sup(&self, query: &Interval) -> Option<f64> {
        piecewise::sup_over(self.pieces()?, query)
    }

    /// Exact inf over `query ∩ domain`, as [`ControlFunction::exact_sup`].
    pub fn exact_inf(&self, query: &Interval) -> Option<f64> {
        piecewise::inf_over(self.pieces()?, query)
    }

    /// Points used to enforce the range contract: a 2001-point grid over the
    /// first two units of the domain, far probes, approaches to open
    /// endpoints and all closed breakpoints.
    pub fn validation_points(&self) -> Vec<f64> {
        let d = &self.domain;
        let lo = if d.lo.is_finite() { d.lo } else { -2.0 };
        let hi = if d.hi.is_finite() { d.hi.min(lo + 2.0) } else { lo + 2.0 };
        let mut pts: Vec<f64> = (0..=2000).map(|i| lo + (hi - lo) * i as f64 / 2000.0).collect();
        pts.extend([5.0, 10.0, 100.0, 1000.0].iter().map(|k| lo + k));
        if d.lo.is_finite() {
            pts.extend(right_approach(d.lo, (hi - lo).max(tau()), 40));
        }
        if d.hi.is_finite() {
            let w = (d.hi - lo).max(tau());
            pts.extend((1..=40).map(|j| d.hi - w * 0.5_f64.powi(j)));
        }
        pts.extend(self.breakpoints());
        sorted_unique(pts)
            .into_iter()
            .filter(|&t| d.contains(t))
            .collect()
    }

    fn enforce_contract(&self) -> Result<()> {
        for t in self.validation_points() {
            let v = self.eval(t)?;
            if !self.contract.admits(v) {
                return Err(Error::RangeContract {
                    label: self.label.clone(),
                    contract: self.contract.name().to_string(),
                    at: t,
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Pointwise product on the common domain. Stays piecewise when every
    /// cell product is constant or affine.
    pub fn product(a: &ControlFunction, b: &ControlFunction) -> Result<ControlFunction> {
        let label = format!("{}·{}", a.label, b.label);
        let domain = a.domain.intersect(&b.domain).ok_or_else(|| {
            Error::InvalidParameter(format!("{label}: disjoint domains"))
        })?;
        if let (Some(pa), Some(pb)) = (a.pieces(), b.pieces()) {
            if let Some(pieces) = piecewise::combine(pa, pb, &domain, Shape::mul) {
                return Self::piecewise(label, RangeContract::Generic, pieces);
            }
        }
        let (fa, fb) = (a.clone(), b.clone());
        Self::from_fallible(label, RangeContract::Generic, Some(domain), move |t| {
            Ok(fa.eval(t)? * fb.eval(t)?)
        })
    }

    /// JSON description; closures have none.
    pub fn to_json(&self) -> Result<ControlJson> {
        let pieces = self
            .pieces()
            .ok_or_else(|| Error::NotSerializable(self.label.clone()))?;
        Ok(ControlJson {
            label: self.label.clone(),
            range_contract: self.contract,
            pieces: pieces.to_vec(),
        })
    }
}

/// Serialized form of a piecewise control function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlJson {
    pub label: String,
    pub range_contract: RangeContract,
    pub pieces: Vec<Piece>,
}

impl TryFrom<ControlJson> for ControlFunction {
    type Error = Error;

    fn try_from(j: ControlJson) -> Result<Self> {
        ControlFunction::piecewise(j.label, j.range_contract, j.pieces)
    }
}
