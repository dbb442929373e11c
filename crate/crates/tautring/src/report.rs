//! JSON-lines verification reports.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use tautring_core::check::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl VerificationReport {
    pub fn from_check(instance: &str, c: &Check) -> Self {
        VerificationReport {
            check: c.name.clone(),
            instance: instance.into(),
            status: if c.passed { Status::Pass } else { Status::Fail },
            witness: c.witness.clone(),
        }
    }

    pub fn error(check: &str, instance: &str, e: impl ToString) -> Self {
        VerificationReport { check: check.into(), instance: instance.into(), status: Status::Error, witness: Some(e.to_string()) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn from_checks(instance: &str, checks: &[Check]) -> Vec<VerificationReport> {
    checks.iter().map(|c| VerificationReport::from_check(instance, c)).collect()
}

pub fn write_lines<W: Write>(out: &mut W, reports: &[VerificationReport]) -> io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// One human-readable line for stderr.
pub fn summary(reports: &[VerificationReport]) -> String {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let (pass, fail, error) = (count(Status::Pass), count(Status::Fail), count(Status::Error));
    let head = if fail + error == 0 { "ok" } else { "FAILED" };
    let mut line = format!("{head}: {pass} passed, {fail} failed, {error} errors");
    if let Some(r) = reports.iter().find(|r| !r.passed()) {
        line.push_str(&format!("; first: {} on {}", r.check, r.instance));
        if let Some(w) = &r.witness {
            line.push_str(&format!(" ({w})"));
        }
    }
    line
}
