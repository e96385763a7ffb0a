//! Control functions built from other control functions.

use super::function::{ControlFunction, RangeContract};
use super::piecewise::{self, Shape};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// `p(s) = s − (1 − s)·γ(s)` on the domain of `γ`.
///
/// Constant pieces of `γ` become affine pieces of `p`; otherwise `p` is a
/// closure.
pub fn p_from_gamma(gamma: &ControlFunction) -> Result<ControlFunction> {
    let label = format!("p[{}]", gamma.label());
    if let Some(pieces) = gamma.pieces() {
        let mapped = piecewise::map_shapes(pieces, |piece| match piece.shape {
            Shape::Constant(c) => Some(Ok(Shape::affine(1.0 + c, -c))),
            Shape::Affine { .. } => None,
        });
        if let Some(pieces) = mapped {
            return ControlFunction::piecewise(label, RangeContract::Generic, pieces?);
        }
    }
    let g = gamma.clone();
    ControlFunction::from_fallible(label, RangeContract::Generic, Some(*gamma.domain()), move |s| {
        Ok(s - (1.0 - s) * g.eval(s)?)
    })
}

/// `t ↦ 1 + γ(1 − β(t))`, the largest admissible `α` for the pair `(β, γ)`.
///
/// `γ` is only evaluated on `(0,1]`; an argument outside its domain is
/// reported as an error rather than extrapolated.
pub fn alpha_bound_from(beta: &ControlFunction, gamma: &ControlFunction) -> Result<ControlFunction> {
    for t in beta.validation_points() {
        let b = beta.eval(t)?;
        if b >= 1.0 {
            return Err(Error::NotUnitValued {
                label: beta.label().to_string(),
                at: t,
                value: b,
            });
        }
    }
    let label = format!("1+{}(1-{})", gamma.label(), beta.label());
    if let Some(pieces) = beta.pieces() {
        let mapped = piecewise::map_shapes(pieces, |piece| match piece.shape {
            Shape::Constant(b) => Some(gamma.eval(1.0 - b).map(|g| Shape::Constant(1.0 + g))),
            Shape::Affine { .. } => None,
        });
        if let Some(pieces) = mapped {
            return ControlFunction::piecewise(label, RangeContract::Alpha, pieces?);
        }
    }
    let (b, g) = (beta.clone(), gamma.clone());
    ControlFunction::from_fallible(label, RangeContract::Alpha, Some(*beta.domain()), move |t| {
        Ok(1.0 + g.eval(1.0 - b.eval(t)?)?)
    })
}

/// `γ(s) = s + s² + … + s^m` on `(0,1]`.
pub fn gamma_poly_family(m: u32) -> Result<ControlFunction> {
    if m == 0 {
        return Err(Error::InvalidParameter("polynomial degree m must be at least 1".into()));
    }
    ControlFunction::from_fn(
        format!("gamma_poly[{m}]"),
        RangeContract::Gamma,
        Some(Interval::open_closed(0.0, 1.0)),
        move |s| (1..=m).map(|i| s.powi(i as i32)).sum(),
    )
}
