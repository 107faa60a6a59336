use std::fmt;

use serde_json::{json, Value};

/// Budget for exhaustive sweeps and the seed used when the domain exceeds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub budget: u64,
    pub seed: u64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep { budget: 1_000_000, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sampled(u64),
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepMode::Exhaustive => f.write_str("exhaustive"),
            SweepMode::Sampled(seed) => write!(f, "sampled({seed})"),
        }
    }
}

/// Most failures kept verbatim in a report.
const MAX_LISTED: usize = 1000;

/// Outcome of an exact identity sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub identity: String,
    pub domain: Value,
    pub checked: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
    pub mode: SweepMode,
}

impl VerificationReport {
    pub fn new(identity: &str, domain: Value, mode: SweepMode) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            domain,
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            mode,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn extend_failures(&mut self, failures: Vec<String>) {
        self.failure_count += failures.len() as u64;
        let room = MAX_LISTED.saturating_sub(self.failures.len());
        self.failures.extend(failures.into_iter().take(room));
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        let room = MAX_LISTED.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "identity": self.identity,
            "domain": self.domain,
            "checked": self.checked,
            "failures": self.failures,
            "mode": self.mode.to_string(),
        });
        if self.failure_count > self.failures.len() as u64 {
            v["failure_count"] = json!(self.failure_count);
        }
        v
    }
}
