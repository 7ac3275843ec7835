//! Command reports: a human summary plus a machine-readable payload, rendered
//! as text or as structured JSON. Nothing time- or host-dependent goes in.

use serde::Serialize;
use serde_json::{json, Value};

use orbitalg::chaincx::{HomologyGroup, HomologyResult};
use orbitalg::exactlin::CoeffRing;
use orbitalg::report::CheckReport;

use crate::document::ring_label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Exit 0.
    Pass,
    /// Exit 1: a mathematical property failed.
    Fail,
    /// Exit 2: usage or input format problem.
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub lines: Vec<String>,
    pub payload: Value,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), status: Status::Pass, lines: Vec::new(), payload: Value::Null }
    }

    pub fn error(command: impl Into<String>, message: impl Into<String>) -> Self {
        let message = message.into();
        Report {
            command: command.into(),
            status: Status::Error,
            lines: vec![format!("error: {message}")],
            payload: json!({ "error": message }),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let mut s = self.lines.join("\n");
                s.push('\n');
                s
            }
            OutputFormat::Structured => {
                let v = json!({
                    "schema_version": crate::document::SCHEMA_VERSION,
                    "command": self.command,
                    "status": self.status,
                    "summary": self.lines,
                    "payload": self.payload,
                });
                crate::document::layout(&v)
            }
        }
    }
}


pub fn check_value(r: &CheckReport) -> Value {
    json!({
        "check": r.check,
        "passed": r.passed(),
        "instances": r.checked,
        "failures": r.failure_count,
        "window": r.window.map(|(lo, hi)| json!([lo, hi])),
        "witnesses": r.witnesses.iter().map(|w| json!({
            "property": w.property,
            "at": w.at,
            "residual": w.residual,
        })).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

pub fn group_value(m: i64, g: &HomologyGroup) -> Value {
    match g {
        HomologyGroup::Known { rank, torsion } => json!({
            "degree": m,
            "determined": true,
            "rank": rank,
            "torsion": torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        }),
        HomologyGroup::Undetermined => json!({ "degree": m, "determined": false, "rank": null, "torsion": [] }),
    }
}

/// One `H<m> = ...` line per degree; `prefix` is `H` or `H^`.
pub fn homology_lines(h: &HomologyResult, ring: &CoeffRing, prefix: &str) -> Vec<String> {
    h.groups.iter().map(|(m, g)| format!("{prefix}{m} = {}", g.render(ring))).collect()
}

pub fn homology_value(h: &HomologyResult, cohomology: bool) -> Value {
    json!({
        "coefficients": ring_label(&h.ring),
        "cohomology": cohomology,
        "groups": h.groups.iter().map(|(m, g)| group_value(*m, g)).collect::<Vec<_>>(),
    })
}
