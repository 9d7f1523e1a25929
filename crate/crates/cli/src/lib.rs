//! Batch driver for the verification suites: every command produces a
//! [`report::Report`] and optional CSV dumps.

pub mod args;
pub mod commands;
pub mod report;

pub use report::{Check, Report};
