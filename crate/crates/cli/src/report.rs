//! Check results and their text / JSON renderings.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::scenario::Scenario;
use crate::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub field: String,
    pub expected: Value,
    pub actual: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub kind: String,
    pub claim: String,
    pub status: Status,
    pub computed: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Looks up a computed value by key.
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.computed.get(key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub digest: String,
    pub checks: Vec<CheckResult>,
    pub status: Status,
    pub exit_code: i32,
}

/// `sha256:<hex>` of the scenario's canonical JSON.
pub fn scenario_digest(s: &Scenario) -> String {
    format!(
        "sha256:{}",
        hex::encode(Sha256::digest(s.to_json().as_bytes()))
    )
}

impl Report {
    pub fn new(scenario: &Scenario, checks: Vec<CheckResult>) -> Self {
        let ok = checks.iter().all(CheckResult::passed);
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            scenario: scenario.name.clone(),
            digest: scenario_digest(scenario),
            checks,
            status: if ok { Status::Pass } else { Status::Fail },
            exit_code: if ok { 0 } else { 1 },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, kind: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.kind == kind)
    }

    /// The first failing check with its first differing value (or error).
    pub fn first_failure(&self) -> Option<String> {
        let c = self.checks.iter().find(|c| !c.passed())?;
        Some(match (&c.error, c.mismatches.first()) {
            (Some(e), _) => format!("{}: {e}", c.kind),
            (None, Some(m)) => format!(
                "{}: {} expected {} but computed {}",
                c.kind,
                m.field,
                plain(&m.expected),
                plain(&m.actual)
            ),
            (None, None) => format!("{}: failed", c.kind),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "scenario: {}", self.scenario).unwrap();
        writeln!(out, "digest:   {}", self.digest).unwrap();
        for c in &self.checks {
            writeln!(out).unwrap();
            writeln!(out, "[{}] {}: {}", c.status.label(), c.kind, c.claim).unwrap();
            write_map(&mut out, &c.computed, 1);
            for m in &c.mismatches {
                writeln!(
                    out,
                    "    ! {}: expected {}, computed {}",
                    m.field,
                    plain(&m.expected),
                    plain(&m.actual)
                )
                .unwrap();
            }
            if let Some(e) = &c.error {
                writeln!(out, "    ! error: {e}").unwrap();
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        writeln!(out).unwrap();
        writeln!(
            out,
            "status: {} ({passed}/{} checks)",
            self.status.label(),
            self.checks.len()
        )
        .unwrap();
        out
    }
}

/// JSON value without quotes around strings; `"n/1"` prints as `n`.
pub fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => match s.strip_suffix("/1") {
            Some(n) if n.parse::<num_bigint::BigInt>().is_ok() => n.to_string(),
            _ => s.clone(),
        },
        Value::Null => "-".into(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(plain).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => format!(
            "{{{}}}",
            m.iter()
                .map(|(k, v)| format!("{k}: {}", plain(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        other => other.to_string(),
    }
}

fn write_map(out: &mut String, m: &Map<String, Value>, depth: usize) {
    let pad = "    ".repeat(depth);
    for (k, v) in m {
        match v {
            Value::Object(inner) if !inner.is_empty() => {
                writeln!(out, "{pad}{k}:").unwrap();
                write_map(out, inner, depth + 1);
            }
            Value::Array(xs) if xs.iter().any(Value::is_object) => {
                writeln!(out, "{pad}{k}:").unwrap();
                for x in xs {
                    writeln!(out, "{pad}    - {}", plain(x)).unwrap();
                }
            }
            _ => writeln!(out, "{pad}{k} = {}", plain(v)).unwrap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    }
}
