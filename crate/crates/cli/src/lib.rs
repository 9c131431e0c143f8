//! Verification battery and shared runner plumbing for the laboratory
//! CLI. Each criterion runs standalone, measures its quantities, and
//! reports one pass/fail line; the acceptance test suite drives the same
//! functions.

pub mod verify;

pub use verify::{run_battery, BatteryMode, CriterionResult};
