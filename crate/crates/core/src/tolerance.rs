//! Global numerical tolerances.
//!
//! Two constants govern every comparison in the crate:
//!
//! * `τ` ([`tau`]): equality tolerance. Two reals closer than `τ` are the same
//!   value, a breakpoint within `τ` of an argument captures it, and non-strict
//!   inequalities are allowed to fail by at most `τ`.
//! * `μ` ([`MU`]): strict-inequality margin. A claim `u < v` passes only when
//!   `v - u > μ`.
//!
//! `τ` can be overridden through the `CONTRACTUM_TOL` environment variable; the
//! value is read once, on first use.

use std::sync::OnceLock;

/// Default equality tolerance.
pub const DEFAULT_TAU: f64 = 1e-12;

/// Margin for strict inequalities.
pub const MU: f64 = 1e-9;

/// Environment variable overriding `τ`.
pub const TOL_ENV: &str = "CONTRACTUM_TOL";

static TAU: OnceLock<f64> = OnceLock::new();

/// Parses a tolerance override. Only finite positive values are accepted.
pub fn parse_tolerance(raw: &str) -> Option<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() && *v > 0.0)
}

/// Current equality tolerance `τ`.
pub fn tau() -> f64 {
    *TAU.get_or_init(|| {
        std::env::var(TOL_ENV)
            .ok()
            .and_then(|raw| parse_tolerance(&raw))
            .unwrap_or(DEFAULT_TAU)
    })
}

/// `a` and `b` agree within `τ`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tau()
}

/// Strict `u < v` with margin `μ`.
pub fn strictly_less(u: f64, v: f64) -> bool {
    v - u > MU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_garbage_and_nonpositive() {
        assert_eq!(parse_tolerance("1e-10"), Some(1e-10));
        assert_eq!(parse_tolerance(" 0.5 "), Some(0.5));
        assert_eq!(parse_tolerance("0"), None);
        assert_eq!(parse_tolerance("-1e-3"), None);
        assert_eq!(parse_tolerance("inf"), None);
        assert_eq!(parse_tolerance("abc"), None);
    }

    #[test]
    fn strict_margin() {
        assert!(strictly_less(0.0, 2.0 * MU));
        assert!(!strictly_less(0.0, MU / 2.0));
    }
}
