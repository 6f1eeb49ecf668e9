//! Verification scenarios and their structured reports.
//!
//! Each scenario discretizes one inequality or counterexample on a grid,
//! measures the relevant constants and norms, and returns an
//! [`report::InequalityReport`] with a pass/fail/inconclusive verdict.

pub mod report;
pub mod scans;
pub mod scenarios;
