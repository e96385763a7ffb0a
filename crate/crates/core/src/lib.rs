//! Fixed-point iteration and hypothesis checking for (α, β)-contractions of
//! finite-valued mappings on metric spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod control;
pub mod corpus;
pub mod error;
pub mod interval;
pub mod metric;
pub mod multimap;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod summability;
pub mod tolerance;

pub use error::{Error, Result};
