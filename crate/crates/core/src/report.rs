//! Machine-readable run reports and the exit-code contract.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Largest numeric deviation, when the check is numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Failing samples out of `samples`, for exact sampled checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn bare(name: &str, status: Status) -> Check {
        Check { name: name.to_string(), status, residual: None, tolerance: None, mismatches: None, samples: None, note: None }
    }

    pub fn flag(name: &str, ok: bool) -> Check {
        Check::bare(name, if ok { Status::Pass } else { Status::Fail })
    }

    /// Passes when `residual ≤ tolerance`; NaN fails.
    pub fn numeric(name: &str, residual: f64, tolerance: f64) -> Check {
        Check { residual: Some(residual), tolerance: Some(tolerance), ..Check::flag(name, residual <= tolerance) }
    }

    /// Exact check over `samples` items, `mismatches` of which failed.
    pub fn exact(name: &str, mismatches: usize, samples: usize) -> Check {
        Check { mismatches: Some(mismatches), samples: Some(samples), ..Check::flag(name, mismatches == 0) }
    }

    /// A check that could not run: indeterminate numerics stay
    /// indeterminate, every other error is a failure.
    pub fn from_error(name: &str, err: &Error) -> Check {
        let status = if matches!(err, Error::Indeterminate(_)) { Status::Indeterminate } else { Status::Fail };
        Check::bare(name, status).with_note(err.to_string())
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    /// Computed values (orbit labels, matrices, closed-form comparisons).
    pub data: BTreeMap<String, Value>,
    /// Wall-clock milliseconds per section; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report { command: command.into(), checks: Vec::new(), data: BTreeMap::new(), timings_ms: BTreeMap::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.data.insert(key.to_string(), v);
    }

    /// Runs `f`, records its time under `section` and turns an error into a
    /// single check named `section`.
    pub fn section(&mut self, section: &str, f: impl FnOnce(&mut Report) -> crate::error::Result<()>) {
        let start = Instant::now();
        if let Err(e) = f(self) {
            self.push(Check::from_error(section, &e));
        }
        self.timings_ms.insert(section.to_string(), start.elapsed().as_secs_f64() * 1e3);
    }

    /// [`Report::section`] for a body that only produces checks.
    pub fn checks_section(&mut self, section: &str, f: impl FnOnce() -> crate::error::Result<Vec<Check>>) {
        self.section(section, |r| {
            r.extend(f()?);
            Ok(())
        });
    }

    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Indeterminate) {
            Status::Indeterminate
        } else {
            Status::Pass
        }
    }

    /// 0 when every check passes, 1 on any failure, otherwise 2.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Indeterminate => 2,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// JSON without timings, for determinism comparisons.
    pub fn to_json_untimed(&self) -> String {
        let mut r = self.clone();
        r.timings_ms.clear();
        r.to_json()
    }
}
