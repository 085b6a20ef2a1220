//! Check records shared by the catalog driver and the command-line tool.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::scalars::{format_rational, Assignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn pass(id: impl Into<String>) -> Self {
        CheckRecord { id: id.into(), status: Status::Pass, residual: None, witness: None, note: None }
    }

    pub fn fail(id: impl Into<String>, residual: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            status: Status::Fail,
            residual: Some(residual.into()),
            witness: None,
            note: None,
        }
    }

    pub fn from_bool(id: impl Into<String>, ok: bool, residual: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass(id)
        } else {
            Self::fail(id, residual())
        }
    }

    pub fn with_witness(mut self, w: &Assignment) -> Self {
        self.witness = Some(witness_strings(w));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

pub fn witness_strings(w: &Assignment) -> BTreeMap<String, String> {
    w.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect()
}

/// All checks run for one catalog entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub entry: String,
    pub checks: Vec<CheckRecord>,
}

impl EntryReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}
