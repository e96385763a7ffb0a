//! The recursion `φ_{n+1} = φ(φ_n)·φ_n`, the power-rate bound
//! `φ_n ≤ (pC·n + t0^{-p})^{-1/p}`, and summability evidence.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::control::{ControlFunction, RangeContract};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::report::{Property, PropertyReport, Witness, WitnessLog};
use crate::tolerance::{tau, MU};

/// Minimal length of a non-truncated sequence for [`summability_verdict`].
pub const MIN_VERDICT_TERMS: usize = 100;
/// Tail-ratio gaps shrinking by more than this factor between the middle
/// and the end of the sequence count as sub-geometric decay.
const GAP_RETENTION: f64 = 0.9;

fn check_power_params(c: f64, p: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0,1), got {p}")));
    }
    Ok(())
}

/// `φ(t) = 1 − C·t^p` on `[0, C^{-1/p})`.
pub fn phi_power(c: f64, p: f64) -> Result<ControlFunction> {
    check_power_params(c, p)?;
    let edge = c.powf(-1.0 / p);
    ControlFunction::from_fn(
        format!("1-{c}t^{p}"),
        RangeContract::Generic,
        Some(Interval::closed_open(0.0, edge)),
        move |t| 1.0 - c * t.powf(p),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSequence {
    pub phi: String,
    pub t0: f64,
    /// `φ_0 = t0, φ_1, …`
    pub values: Vec<f64>,
    /// `Σ_{k ≤ n} φ_k`
    pub partial_sums: Vec<f64>,
    /// Index of the first term that fell to `τ` or below and was dropped.
    pub truncated_at: Option<usize>,
}

impl PhiSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Runs the recursion for up to `n` steps from `t0`.
pub fn phi_sequence(phi: &ControlFunction, t0: f64, n: usize) -> Result<PhiSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(t0 > 0.0) || !phi.domain().contains(t0) {
        return Err(Error::OutOfDomain {
            label: phi.label().to_string(),
            point: vec![t0],
        });
    }
    let mut values = vec![t0];
    let mut partial_sums = vec![t0];
    let mut truncated_at = None;
    for k in 0..n {
        let t = values[k];
        let factor = phi.eval(t).map_err(|_| Error::MajorantLeavesUnitInterval {
            at: t,
            value: phi.eval_unchecked(t),
        })?;
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::MajorantLeavesUnitInterval { at: t, value: factor });
        }
        let next = factor * t;
        if next <= tau() {
            truncated_at = Some(k + 1);
            break;
        }
        values.push(next);
        partial_sums.push(partial_sums[k] + next);
    }
    Ok(PhiSequence {
        phi: phi.label().to_string(),
        t0,
        values,
        partial_sums,
        truncated_at,
    })
}

/// `(pC·n + t0^{-p})^{-1/p}`
pub fn power_bound(c: f64, p: f64, t0: f64, n: usize) -> f64 {
    (p * c * n as f64 + t0.powf(-p)).powf(-1.0 / p)
}

/// Checks `φ_n ≤ bound_n + τ` and `φ_{k+1}^{-p} − φ_k^{-p} > pC − μ` along
/// the sequence for `φ = 1 − C·t^p`.
pub fn bound_check(c: f64, p: f64, t0: f64, n: usize) -> Result<(PropertyReport, PhiSequence)> {
    let phi = phi_power(c, p)?;
    let seq = phi_sequence(&phi, t0, n)?;
    let tol = tau();
    let mut log = WitnessLog::new();
    let mut min_increment = f64::INFINITY;
    for (k, &v) in seq.values.iter().enumerate() {
        let b = power_bound(c, p, t0, k);
        if v > b + tol {
            log.push(Witness::scalar(k as f64, v, b - v).with_note("φ_n ≤ (pC·n + t0^{-p})^{-1/p}"));
        }
        if let Some(&next) = seq.values.get(k + 1) {
            let inc = next.powf(-p) - v.powf(-p);
            min_increment = min_increment.min(inc);
            if inc <= p * c - MU {
                log.push(Witness::scalar(k as f64, inc, inc - (p * c - MU)).with_note("increment > pC"));
            }
        }
    }
    let params = json!({
        "C": c,
        "p": p,
        "t0": t0,
        "N": n,
        "terms": seq.len(),
        "truncated_at": seq.truncated_at,
        "min_increment": if min_increment.is_finite() { json!(min_increment) } else { json!(null) },
    });
    Ok((PropertyReport::from_log(Property::PowerRateBound, log, params), seq))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    TailRatio,
    BoundFit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    SummableEvidence,
    Inconclusive,
    DivergingEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityVerdict {
    pub evidence: Evidence,
    /// Criterion that produced the verdict.
    pub criterion: Criterion,
    /// `1 − φ_{n+1}/φ_n` at the end of the sequence.
    pub tail_gap: Option<f64>,
    /// Fitted decay exponent `e` in `φ_n ≈ c·n^{-e}`.
    pub exponent: Option<f64>,
}

fn fit_exponent(values: &[f64]) -> Result<f64> {
    let start = (values.len() / 2).max(1);
    let pts: Vec<(f64, f64)> = (start..values.len())
        .map(|n| ((n as f64).ln(), values[n].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::TooShort {
            needed: 4,
            got: values.len(),
        });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(-sxy / sxx)
}

/// Evidence for `Σ φ_n < ∞` from a finite prefix.
///
/// `TailRatio` accepts a gap `1 − φ_{n+1}/φ_n` that is positive and does not
/// shrink between the middle and the end of the sequence; otherwise it
/// falls through to `BoundFit`, a least-squares fit of `log φ_n` against
/// `log n` over the last half.
pub fn summability_verdict(seq: &PhiSequence, criterion: Criterion) -> Result<SummabilityVerdict> {
    let v = &seq.values;
    if v.len() < MIN_VERDICT_TERMS && (seq.truncated_at.is_none() || v.len() < 4) {
        return Err(Error::TooShort {
            needed: MIN_VERDICT_TERMS,
            got: v.len(),
        });
    }
    let gap = |n: usize| 1.0 - v[n + 1] / v[n];
    let tail_gap = gap(v.len() - 2);
    if criterion == Criterion::TailRatio {
        let mid_gap = gap(v.len() / 2 - 1);
        if tail_gap > MU && tail_gap >= GAP_RETENTION * mid_gap {
            return Ok(SummabilityVerdict {
                evidence: Evidence::SummableEvidence,
                criterion: Criterion::TailRatio,
                tail_gap: Some(tail_gap),
                exponent: None,
            });
        }
    }
    let e = fit_exponent(v)?;
    let evidence = if e > 1.0 + MU {
        Evidence::SummableEvidence
    } else if e <= 1.0 {
        Evidence::DivergingEvidence
    } else {
        Evidence::Inconclusive
    };
    Ok(SummabilityVerdict {
        evidence,
        criterion: Criterion::BoundFit,
        tail_gap: Some(tail_gap),
        exponent: Some(e),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityRow {
    pub n: usize,
    pub phi_n: f64,
    pub bound_n: f64,
    pub partial_sum: f64,
}

pub fn summability_rows(seq: &PhiSequence, c: f64, p: f64) -> Vec<SummabilityRow> {
    seq.values
        .iter()
        .zip(&seq.partial_sums)
        .enumerate()
        .map(|(n, (&phi_n, &partial_sum))| SummabilityRow {
            n,
            phi_n,
            bound_n: power_bound(c, p, seq.t0, n),
            partial_sum,
        })
        .collect()
}

/// CSV with header `n,phi_n,bound_n,partial_sum`.
pub fn write_csv<W: Write>(rows: &[SummabilityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_power_values() {
        let phi = phi_power(1.0, 0.5).unwrap();
        assert_eq!(phi.eval(0.25).unwrap(), 0.5);
        assert_eq!(phi.eval(0.0).unwrap(), 1.0);
        let steep = phi_power(2.0, 0.5).unwrap();
        assert!(steep.eval(1.0).is_err());
        assert_eq!(steep.eval_unchecked(1.0), -1.0);
        assert!(phi_power(0.0, 0.5).is_err());
        assert!(phi_power(1.0, 1.0).is_err());
    }

    #[test]
    fn one_step_by_hand() {
        let seq = phi_sequence(&phi_power(1.0, 0.5).unwrap(), 0.25, 1).unwrap();
        assert_eq!(seq.values, vec![0.25, 0.125]);
        assert_eq!(seq.partial_sums, vec![0.25, 0.375]);
    }

    #[test]
    fn geometric_sequence_truncates() {
        let half = ControlFunction::constant("1/2", RangeContract::Generic, 0.5).unwrap();
        let seq = phi_sequence(&half, 1.0, 1000).unwrap();
        assert_eq!(seq.truncated_at, Some(40));
        for (n, v) in seq.values.iter().enumerate() {
            assert_eq!(*v, 0.5_f64.powi(n as i32));
        }
        assert!((seq.partial_sums.last().unwrap() - 2.0).abs() < 1e-11);
        let v = summability_verdict(&seq, Criterion::TailRatio).unwrap();
        assert_eq!(v.evidence, Evidence::SummableEvidence);
        assert_eq!(v.criterion, Criterion::TailRatio);
    }

    #[test]
    fn leaving_unit_interval_is_error() {
        let big = ControlFunction::constant("2", RangeContract::Generic, 2.0).unwrap();
        let err = phi_sequence(&big, 1.0, 5).unwrap_err();
        assert!(err.to_string().starts_with("majorant leaves (0,1)"));
        let steep = phi_power(2.0, 0.5).unwrap();
        // domain edge is 1/4
        assert!(phi_sequence(&steep, 0.2, 5).is_ok());
        assert!(phi_sequence(&steep, 0.25, 5).is_err());
        assert!(phi_sequence(&steep, 1.0, 5).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(power_bound(1.0, 0.5, 0.25, 0), 0.25);
        assert!((power_bound(1.0, 0.5, 0.25, 1) - 0.16).abs() < 1e-15);
        let (r, seq) = bound_check(0.5, 0.5, 0.5, 10_000).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(seq.len(), 10_001);
        assert!(seq.values.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    }

    #[test]
    fn power_rate_fits_exponent_two() {
        let seq = phi_sequence(&phi_power(0.5, 0.5).unwrap(), 0.5, 10_000).unwrap();
        let v = summability_verdict(&seq, Criterion::TailRatio).unwrap();
        assert_eq!(v.evidence, Evidence::SummableEvidence);
        assert_eq!(v.criterion, Criterion::BoundFit);
        let e = v.exponent.unwrap();
        assert!((e - 2.0).abs() < 0.05, "{e}");
    }

    #[test]
    fn harmonic_decay_diverges() {
        let phi = ControlFunction::from_fn("1-t", RangeContract::Generic, Some(Interval::open(0.0, 1.0)), |t| 1.0 - t)
            .unwrap();
        let seq = phi_sequence(&phi, 0.5, 10_000).unwrap();
        let v = summability_verdict(&seq, Criterion::BoundFit).unwrap();
        assert_eq!(v.evidence, Evidence::DivergingEvidence, "{v:?}");
        assert!((v.exponent.unwrap() - 1.0).abs() < 0.01);
    }

    #[test]
    fn too_short() {
        let seq = phi_sequence(&phi_power(0.5, 0.5).unwrap(), 0.5, 10).unwrap();
        assert!(matches!(summability_verdict(&seq, Criterion::TailRatio), Err(Error::TooShort { .. })));
    }

    #[test]
    fn csv_header_and_rows() {
        let (_, seq) = bound_check(1.0, 0.5, 0.25, 3).unwrap();
        let rows = summability_rows(&seq, 1.0, 0.5);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,phi_n,bound_n,partial_sum");
        assert_eq!(lines.count(), 4);
    }
}
