//! Approval-based committee elections under Hamming-distance preferences:
//! rules, executable axioms with replayable witnesses, the reduction from
//! ranking elections, rule synthesis, and application encodings.

pub mod applications;
pub mod approx;
pub mod axioms;
pub mod election;
mod error;
pub mod format;
pub mod ranking;
pub mod reduction;
pub mod rules;
pub mod search;

pub use error::{Error, Result};
