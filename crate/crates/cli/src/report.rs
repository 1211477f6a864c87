//! Machine-readable `key=value` reports and JSON run manifests.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Default)]
pub struct Report {
    config: Vec<(String, String)>,
    result: Vec<(String, String)>,
    /// Kept apart from `result` because timings vary between runs.
    timings: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
}

impl Report {
    pub fn config(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn result(&mut self, key: &str, value: impl ToString) {
        self.result.push((key.to_string(), value.to_string()));
    }

    pub fn timing(&mut self, key: &str, d: Duration) {
        self.timings.push((key.to_string(), format!("{:.3}", d.as_secs_f64() * 1e3)));
    }

    /// Records the SHA-256 digest of an input file's contents.
    pub fn input(&mut self, path: &Path, contents: &[u8]) {
        let digest = hex::encode(Sha256::digest(contents));
        self.inputs.push((path.display().to_string(), digest));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.config.iter().chain(&self.result).chain(&self.timings) {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn render_table(&self) -> String {
        let rows: Vec<_> = self.result.iter().chain(&self.timings).collect();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "| {k:<width$} | {v} |");
        }
        out
    }

    pub fn manifest(&self, argv: &[String]) -> Value {
        let obj = |pairs: &[(String, String)]| {
            Value::Object(
                pairs
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect::<Map<_, _>>(),
            )
        };
        json!({
            "command": argv,
            "inputs": self.inputs.iter()
                .map(|(p, d)| json!({ "path": p, "sha256": d }))
                .collect::<Vec<_>>(),
            "config": obj(&self.config),
            "timings_ms": obj(&self.timings),
            "result": obj(&self.result),
        })
    }
}
