use thiserror::Error;

use crate::multimap::SelectionRecord;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty value set")]
    EmptySet,

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point {point:?} is outside the domain of {label}")]
    OutOfDomain { label: String, point: Vec<f64> },

    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    #[error("not a [0,1)-valued function: {label} takes value {value} at {at}")]
    NotUnitValued { label: String, at: f64, value: f64 },

    #[error("range contract {contract} violated by {label}: value {value} at {at}")]
    RangeContract {
        label: String,
        contract: String,
        at: f64,
        value: f64,
    },

    #[error("invalid piece layout for {label}: {reason}")]
    Pieces { label: String, reason: String },

    #[error("not an (α,β)-mapping at x = {:?}", .near_miss.x.coords())]
    NotAbMapping { near_miss: Box<SelectionRecord> },

    #[error("alpha bound fails: α({at}) = {alpha} exceeds 1 + γ(1 − β) = {bound}")]
    AlphaBound { at: f64, alpha: f64, bound: f64 },

    #[error("majorant leaves (0,1): φ({at}) = {value}")]
    MajorantLeavesUnitInterval { at: f64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("too few terms: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("{0} has no serializable description")]
    NotSerializable(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
