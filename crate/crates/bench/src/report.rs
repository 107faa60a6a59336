//! The JSON report every suite produces.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use cotype_core::check::Check;
use cotype_core::torus::FLOAT_TOLERANCE;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub params: Value,
    pub quantities: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub timing_ms: u128,
    /// Set in float mode.
    pub tolerance: Option<f64>,
    /// Per-suite reports of an `all` run.
    pub suites: Vec<Report>,
}

impl Report {
    pub fn new(suite: &str, params: Value, float: bool) -> Self {
        Report {
            suite: suite.to_string(),
            params,
            quantities: BTreeMap::new(),
            checks: Vec::new(),
            timing_ms: 0,
            tolerance: float.then_some(FLOAT_TOLERANCE),
            suites: Vec::new(),
        }
    }

    pub fn quantity(&mut self, name: impl Into<String>, value: impl Into<Value>) {
        self.quantities.insert(name.into(), value.into());
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// True when this report and every nested one has no failing check.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed) && self.suites.iter().all(Report::passed)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| format!("{}: {} ({})", self.suite, c.name, c.detail))
            .collect();
        out.extend(self.suites.iter().flat_map(Report::failures));
        out
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.untimed_json();
        stamp(&mut v, self);
        v
    }

    /// The report without any `timing_ms` field, for reproducibility checks.
    pub fn untimed_json(&self) -> Value {
        let mut v = json!({
            "suite": self.suite,
            "params": self.params,
            "quantities": self.quantities,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        });
        if let Some(t) = self.tolerance {
            v["tolerance"] = json!(t);
        }
        if !self.suites.is_empty() {
            v["suites"] = Value::Array(self.suites.iter().map(Report::untimed_json).collect());
        }
        v
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// Writes through a temporary file in the same directory and renames.
    pub fn write_atomic(&self, path: &Path) -> std::io::Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

fn stamp(v: &mut Value, r: &Report) {
    v["timing_ms"] = json!(r.timing_ms as u64);
    if let Some(children) = v.get_mut("suites").and_then(Value::as_array_mut) {
        for (child, report) in children.iter_mut().zip(&r.suites) {
            stamp(child, report);
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let mut file = std::fs::File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::new("bernoulli", json!({}), false);
        let v: Value = serde_json::from_str(&r.render()).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["quantities"], json!({}));
        assert!(v.get("tolerance").is_none());
        assert!(r.passed());
    }

    #[test]
    fn float_reports_carry_tolerance() {
        let r = Report::new("cotype", json!({}), true);
        assert_eq!(r.to_json()["tolerance"], json!(1e-9));
    }

    #[test]
    fn timing_is_only_in_timed_output() {
        let mut r = Report::new("scheme", json!({}), false);
        r.timing_ms = 17;
        assert_eq!(r.to_json()["timing_ms"], json!(17));
        assert!(r.untimed_json().get("timing_ms").is_none());
    }
}
