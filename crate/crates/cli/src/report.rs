use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use lck_core::report::{CheckRecord, Status};

pub const SCHEMA: &str = "lckv-report/1";

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

/// Machine-readable output of one command. Field order and check order are
/// fixed so that identical inputs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub checks: Vec<CheckRecord>,
    pub details: BTreeMap<String, Value>,
    pub summary: Summary,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            checks: Vec::new(),
            details: BTreeMap::new(),
            summary: Summary::default(),
            exit_code: 0,
        }
    }

    pub fn check(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn ok(&mut self, id: impl Into<String>, ok: bool, residual: impl FnOnce() -> String) {
        self.checks.push(CheckRecord::from_bool(id, ok, residual));
    }

    pub fn fail(&mut self, id: impl Into<String>, err: impl ToString) {
        self.checks.push(CheckRecord::fail(id, err.to_string()));
    }

    pub fn detail(&mut self, key: &str, v: impl Into<Value>) {
        self.details.insert(key.to_string(), v.into());
    }

    pub fn finish(mut self) -> Self {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        self.summary = s;
        self.exit_code = if s.fail == 0 { 0 } else { 1 };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.details {
            match v {
                Value::String(s) => writeln!(out, "{k}: {s}"),
                Value::Array(items) => {
                    let parts: Vec<String> = items.iter().map(plain).collect();
                    writeln!(out, "{k}: {}", parts.join(", "))
                }
                other => writeln!(out, "{k}: {}", plain(other)),
            }
            .unwrap();
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            write!(out, "{tag} {}", c.id).unwrap();
            if let Some(r) = &c.residual {
                write!(out, ": {r}").unwrap();
            }
            out.push('\n');
        }
        let s = self.summary;
        writeln!(out, "{} passed, {} failed, {} skipped", s.pass, s.fail, s.skipped).unwrap();
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
