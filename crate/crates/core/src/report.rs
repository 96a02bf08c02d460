//! The shared JSON report envelope.
//!
//! Every machine-readable result is wrapped as
//!
//! ```json
//! {"schema": "robustsat-report", "schema_version": 1, "tool_version": "0.1.0",
//!  "command": "solve", "config": {...}, "verdict": true, "result": {...}}
//! ```
//!
//! `verdict` is `null` for commands that decide nothing (emission,
//! generation). Fields are only ever added within a schema version.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_NAME: &str = "robustsat-report";
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub config: Value,
    pub verdict: Option<bool>,
    pub result: Value,
}

impl Report {
    pub fn new<C: Serialize, R: Serialize>(
        command: impl Into<String>,
        config: &C,
        verdict: Option<bool>,
        result: &R,
    ) -> serde_json::Result<Self> {
        Ok(Report {
            schema: SCHEMA_NAME,
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command: command.into(),
            config: serde_json::to_value(config)?,
            verdict,
            result: serde_json::to_value(result)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }

    /// `key: value` lines for the top-level scalar fields of `result`,
    /// preceded by the verdict. Nested values are written compactly.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        if let Some(v) = self.verdict {
            out.push_str(&format!("verdict: {}\n", if v { "yes" } else { "no" }));
        }
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                match v {
                    Value::Null => continue,
                    Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                    other => out.push_str(&format!("{k}: {other}\n")),
                }
            }
        }
        out
    }
}
