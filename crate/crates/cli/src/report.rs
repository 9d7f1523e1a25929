//! The JSON report written by every command.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// How `value` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Pass iff `value < tolerance`.
    Below,
    /// Pass iff `value > tolerance`.
    Above,
    /// Pass iff `value >= tolerance`.
    AtLeast,
    /// Pass iff `value <= tolerance`, for quantities that must vanish.
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64, bound: Bound) -> Self {
        // NaN fails every comparison, so a non-finite value never passes.
        let pass = match bound {
            Bound::Below => value < tolerance,
            Bound::Above => value > tolerance,
            Bound::AtLeast => value >= tolerance,
            Bound::AtMost => value <= tolerance,
        };
        Check { name: name.into(), value, tolerance, pass }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check::new(name, value, tolerance, Bound::Below)
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check::new(name, value, threshold, Bound::Above)
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check::new(name, value, threshold, Bound::AtLeast)
    }

    /// A failed check standing in for a pipeline error.
    pub fn failed(name: impl Into<String>) -> Self {
        Check { name: name.into(), value: f64::NAN, tolerance: 0.0, pass: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Report { command: command.into(), config, checks, pass, error: None }
    }

    /// Report for a run that stopped with `error` after producing `checks`.
    pub fn aborted(command: impl Into<String>, config: Value, mut checks: Vec<Check>, error: String) -> Self {
        checks.push(Check::failed("completed"));
        let mut r = Report::new(command, config, checks);
        r.error = Some(error);
        r
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())
    }
}
