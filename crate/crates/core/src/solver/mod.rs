//! Hypothesis validation, the iteration itself, and trace diagnostics.

mod iteration;
mod preconditions;

pub use iteration::{
    classify_limit_case, geometric_tail_fit, iterate, steps_nonincreasing, trace_invariants,
    trace_to_jsonl, verify_fixed_point, IterationTrace, LimitCase, StopReason, StopRule, TailFit,
    MIN_CLASSIFY_STEPS,
};
pub use preconditions::{
    validate_preconditions, HypothesisCheck, PreconditionReport, TheoremMode, ESSENTIAL_A_GRID,
};
