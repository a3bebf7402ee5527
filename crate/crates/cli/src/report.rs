//! JSON reports.

use std::collections::BTreeMap;
use std::time::Instant;

use partpoisson::Verdict;
use serde::Serialize;
use serde_json::Value;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessOut {
    pub location: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub timing_ms: f64,
}

impl Check {
    pub fn from_verdict(name: impl Into<String>, v: &Verdict, timing_ms: f64) -> Self {
        let (status, witness, note) = match v {
            Verdict::Pass => (Status::Pass, None, None),
            Verdict::Fail(w) => (
                Status::Fail,
                Some(WitnessOut {
                    location: w.location.clone(),
                    value: w.value.clone(),
                }),
                None,
            ),
            Verdict::Indeterminate(r) => (Status::Indeterminate, None, Some(r.clone())),
        };
        Check {
            name: name.into(),
            status,
            witness,
            note,
            timing_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub input_digest: Option<String>,
    pub tool_version: String,
    pub checks: Vec<Check>,
    pub results: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: &str, input_digest: Option<String>) -> Self {
        Report {
            report_version: REPORT_VERSION,
            command: command.to_string(),
            input_digest,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            checks: Vec::new(),
            results: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, v: &Verdict, timing_ms: f64) {
        self.checks.push(Check::from_verdict(name, v, timing_ms));
    }

    /// Run `f` and record its verdict with the elapsed time.
    pub fn timed<E>(
        &mut self,
        name: impl Into<String>,
        f: impl FnOnce() -> Result<Verdict, E>,
    ) -> Result<Verdict, E> {
        let start = Instant::now();
        let v = f()?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        self.push(name, &v, (ms * 1e3).round() / 1e3);
        Ok(v)
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable result"),
        );
    }

    /// 0 all pass, 1 any fail, 3 no fail but something indeterminate.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if self
            .checks
            .iter()
            .any(|c| c.status == Status::Indeterminate)
        {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Same report with every `timing_ms` zeroed, for comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.timing_ms = 0.0;
        }
        r
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Indeterminate => "indeterminate",
            };
            s.push_str(&format!("{status:<13} {}", c.name));
            if let Some(w) = &c.witness {
                s.push_str(&format!("  [{}: {}]", w.location, w.value));
            }
            if let Some(n) = &c.note {
                s.push_str(&format!("  ({n})"));
            }
            s.push('\n');
        }
        s
    }
}
