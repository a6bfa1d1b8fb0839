//! Incremental knapsack under XOS objectives.
//!
//! Builds element orderings whose prefixes stay within a bounded factor of
//! the optimum knapsack value at every capacity, measures the competitive
//! ratio of arbitrary orderings exactly over the finite breakpoint set, and
//! certifies lower bounds by exhaustive ordering search. Also covers
//! incremental unit-capacity s-t max flow (Quickest-Increment) and
//! potential-based parallel-edge flows compiled to XOS instances.

pub mod algscale;
pub mod error;
pub mod evaluator;
pub mod flows;
pub mod instances;
pub mod objective;
pub mod optimum;
pub mod verify;

pub use error::{Error, Result};
pub use objective::{DualCertificate, Instance, ValidationReport};

/// Absolute tolerance for all value and weight comparisons.
pub const EPS: f64 = 1e-9;

/// Exhaustive subset-enumeration limit (optimum oracle, breakpoints).
pub const ENUM_LIMIT: usize = 22;

/// Exhaustive permutation-search limit (best_ordering).
pub const PERM_LIMIT: usize = 10;

/// Exhaustive dual-feasibility check limit.
pub const DUAL_CHECK_LIMIT: usize = 20;
