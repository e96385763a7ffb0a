//! Control functions (α, β, γ, p, k, φ) and the properties the fixed-point
//! theorems ask of them.

mod checks;
mod derived;
mod function;
mod piecewise;

pub use checks::{
    check_bounded, check_essentially_positive, check_mt, check_nonincreasing, check_r,
    check_stably_positive, lemma21_certificate, q_epsilon, window_sup, QEpsilon, LADDER_DEPTH,
};
pub use derived::{alpha_bound_from, gamma_poly_family, p_from_gamma};
pub use function::{ControlFunction, ControlJson, RangeContract};
pub use piecewise::{Piece, Shape};
pub(crate) use piecewise::partition_domain;
