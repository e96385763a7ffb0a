//! The almost singlevalued map on `[0,1]` with `F(1) = {1/3, 3/4}` and its
//! controls.

use num_rational::Rational64;

use crate::control::{p_from_gamma, ControlFunction, Piece, RangeContract};
use crate::interval::Interval;
use crate::multimap::{Branch, ImageExpr, MapSpec, MultivaluedMap};

pub const LABEL: &str = "example17";

/// Piece endpoints of the map and of its controls, as used by the claim
/// checks.
pub fn breakpoints() -> [f64; 6] {
    [0.0, 1.0 / 3.0, 0.5, 0.75, 5.0 / 6.0, 1.0]
}

pub fn spec() -> MapSpec {
    MapSpec::Piecewise1d {
        branches: vec![
            Branch::new(
                Interval::closed_open(0.0, 0.75),
                vec![ImageExpr::Linear { a: 2.0 / 3.0, b: 0.0 }],
            ),
            Branch::new(Interval::closed_open(0.75, 1.0), vec![ImageExpr::Constant { c: 0.5 }]),
            Branch::new(
                Interval::point(1.0),
                vec![
                    ImageExpr::Constant { c: 1.0 / 3.0 },
                    ImageExpr::Constant { c: 0.75 },
                ],
            ),
        ],
    }
}

pub fn map() -> MultivaluedMap {
    MultivaluedMap::from_spec(LABEL, spec()).expect("static branch layout")
}

/// `4/3` on `[0,1/2]`, `8/3` on `(1/2,∞)`.
pub fn alpha() -> ControlFunction {
    ControlFunction::steps(
        "alpha17",
        RangeContract::Alpha,
        &[
            (Interval::closed(0.0, 0.5), 4.0 / 3.0),
            (Interval::above(0.5), 8.0 / 3.0),
        ],
    )
    .expect("static pieces")
}

/// `2/3` on `[0,1/3]`, `1/2` on `(1/3,1/2]`, `1/3` on `(1/2,∞)`.
pub fn beta() -> ControlFunction {
    ControlFunction::steps(
        "beta17",
        RangeContract::Beta,
        &[
            (Interval::closed(0.0, 1.0 / 3.0), 2.0 / 3.0),
            (Interval::open_closed(1.0 / 3.0, 0.5), 0.5),
            (Interval::above(0.5), 1.0 / 3.0),
        ],
    )
    .expect("static pieces")
}

/// `γ(1/3) = γ(1/2) = 1/3`, `γ(2/3) = 5/3`, `0` elsewhere on `(0,1]`.
pub fn gamma() -> ControlFunction {
    let third = 1.0 / 3.0;
    let two_thirds = 2.0 / 3.0;
    ControlFunction::piecewise(
        "gamma17",
        RangeContract::Gamma,
        vec![
            Piece::constant(Interval::open(0.0, third), 0.0),
            Piece::constant(Interval::point(third), third),
            Piece::constant(Interval::open(third, 0.5), 0.0),
            Piece::constant(Interval::point(0.5), third),
            Piece::constant(Interval::open(0.5, two_thirds), 0.0),
            Piece::constant(Interval::point(two_thirds), 5.0 / 3.0),
            Piece::constant(Interval::open_closed(two_thirds, 1.0), 0.0),
        ],
    )
    .expect("static pieces")
}

pub fn p() -> ControlFunction {
    p_from_gamma(&gamma()).expect("piecewise gamma").with_label("p17")
}

pub(crate) fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub(crate) fn to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{AbsDiff, FiniteClosedSet, Point};
    use crate::multimap::d_f;

    #[test]
    fn map_values() {
        let f = map();
        assert_eq!(f.eval(&Point::scalar(1.0)).unwrap(), FiniteClosedSet::scalars(&[1.0 / 3.0, 0.75]).unwrap());
        assert_eq!(f.eval(&Point::scalar(0.9)).unwrap(), FiniteClosedSet::scalars(&[0.5]).unwrap());
        // both readings of the branch boundary give 1/2
        assert_eq!(f.eval(&Point::scalar(0.75)).unwrap().points()[0].x(), 0.5);
        assert_eq!(2.0 * 0.75 / 3.0, 0.5);
    }

    #[test]
    fn unique_fixed_point_is_zero() {
        let f = map();
        let zeros: Vec<f64> = (0..=10_000)
            .map(|i| i as f64 * 1e-4)
            .filter(|&x| d_f(&f, &Point::scalar(x), &AbsDiff).unwrap() <= 1e-12)
            .collect();
        assert_eq!(zeros, vec![0.0]);
        // branch analysis: 2x/3 = x only at 0; 1/2 ∉ [3/4,1); 1 ∉ {1/3, 3/4}
        assert!(!(0.75..1.0).contains(&0.5));
    }

    #[test]
    fn alpha_matches_gamma_bound_at_breakpoints() {
        let (a, b, g) = (alpha(), beta(), gamma());
        for t in [0.0, 0.2, 1.0 / 3.0, 0.4, 0.5, 0.6, 2.0 / 3.0, 1.0, 5.0] {
            let bound = 1.0 + g.eval(1.0 - b.eval(t).unwrap()).unwrap();
            assert!((a.eval(t).unwrap() - bound).abs() < 1e-12, "t = {t}");
        }
        assert!((1.0 + g.eval(1.0 - b.eval(2.0 / 3.0).unwrap()).unwrap() - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn p_values() {
        let p = p();
        assert!((p.eval(1.0 / 3.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((p.eval(2.0 / 3.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((p.eval(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.eval(0.25).unwrap(), 0.25);
        assert_eq!(to_f64(r(8, 3)), 8.0 / 3.0);
    }
}
