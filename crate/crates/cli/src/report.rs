use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub expected: Value,
    pub actual: Value,
    pub elapsed_ms: u64,
}

impl Check {
    /// Runs `f`, which returns `(status, expected, actual)`, and times it.
    pub fn timed(name: impl Into<String>, f: impl FnOnce() -> (Status, Value, Value)) -> Self {
        let start = Instant::now();
        let (status, expected, actual) = f();
        Check {
            name: name.into(),
            status,
            expected,
            actual,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }

    /// A pass exactly when the serialized values agree.
    pub fn compare(name: impl Into<String>, expected: impl Serialize, actual: impl FnOnce() -> Value) -> Self {
        let expected = serde_json::to_value(expected).expect("serializable");
        Check::timed(name, || {
            let actual = actual();
            (Status::from_bool(actual == expected), expected, actual)
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(config: Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.status == Status::Pass);
        VerificationReport {
            tool: "kleinzeta",
            version: crate::cache::VERSION,
            config,
            checks,
            passed,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Aligned plain-text table, one row per check.
    pub fn to_table(&self) -> String {
        let short = |v: &Value| {
            let s = match v {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            };
            if s.chars().count() > 60 {
                format!("{}...", s.chars().take(57).collect::<String>())
            } else {
                s
            }
        };
        let rows: Vec<[String; 5]> = self
            .checks
            .iter()
            .map(|c| {
                [
                    c.status.as_str().to_owned(),
                    c.name.clone(),
                    short(&c.expected),
                    short(&c.actual),
                    format!("{}", c.elapsed_ms),
                ]
            })
            .collect();
        let header = ["status", "check", "expected", "actual", "ms"].map(String::from);
        let mut widths = header.clone().map(|h| h.len());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&header).chain(&rows) {
            let line: Vec<String> = r.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
        let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
        writeln!(out, "{passed}/{} checks passed", self.checks.len()).unwrap();
        out
    }
}
