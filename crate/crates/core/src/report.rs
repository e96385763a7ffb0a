//! Machine-readable verdicts shared by all checkers.

use serde::{Deserialize, Serialize};

/// Witness lists are truncated to this many entries; the total count of
/// violations is kept separately.
pub const MAX_WITNESSES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnSample,
    Violated,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::HoldsOnSample
    }

    pub fn from_holds(holds: bool) -> Self {
        if holds {
            Verdict::HoldsOnSample
        } else {
            Verdict::Violated
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        Verdict::from_holds(self.holds() && other.holds())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    #[serde(rename = "R")]
    R,
    #[serde(rename = "MT")]
    Mt,
    EssentiallyPositive,
    StablyPositive,
    Nonincreasing,
    Bounded,
    /// `αβ ≤ 1 − p(1 − β)` followed by (MT) for the product.
    ProductMajorant,
    /// Per-step inequalities along an iteration trace.
    TraceInvariants,
    /// `φ_n ≤ (pC·n + t0^{-p})^{-1/p}` with the increment bound.
    PowerRateBound,
}

/// A sampled input where an inequality was evaluated, with its slack.
///
/// `margin` is the signed slack of the checked inequality, negative when the
/// inequality fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub input: Vec<f64>,
    pub value: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    pub fn scalar(t: f64, value: f64, margin: f64) -> Self {
        Self {
            input: vec![t],
            value,
            margin,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn cmp_inputs(a: &Witness, b: &Witness) -> std::cmp::Ordering {
    for (x, y) in a.input.iter().zip(&b.input) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.input.len().cmp(&b.input.len())
}

/// Collects witnesses and produces a deterministic, input-sorted list.
#[derive(Debug, Default)]
pub struct WitnessLog {
    witnesses: Vec<Witness>,
    count: usize,
}

impl WitnessLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, w: Witness) {
        self.count += 1;
        self.witnesses.push(w);
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(mut self) -> (Vec<Witness>, usize) {
        self.witnesses.sort_by(cmp_inputs);
        self.witnesses.truncate(MAX_WITNESSES);
        (self.witnesses, self.count)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    /// Total number of violating inputs (the witness list may be truncated).
    pub violations: usize,
    pub parameters: serde_json::Value,
}

impl PropertyReport {
    pub fn from_log(property: Property, log: WitnessLog, parameters: serde_json::Value) -> Self {
        let verdict = Verdict::from_holds(log.is_empty());
        let (witnesses, violations) = log.finish();
        Self {
            property,
            verdict,
            witnesses,
            violations,
            parameters,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}
