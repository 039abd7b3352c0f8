//! Machine-readable run reports. Serialization is deterministic: maps are
//! ordered, so identical inputs and seeds produce byte-identical JSON apart
//! from the tool version.

use std::collections::BTreeMap;

use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

/// One named residual check: the measured value against its tolerance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualCheck {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Batch run report. `pass` holds exactly when every residual is within its
/// tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    #[serde(rename = "toolVersion")]
    pub tool_version: String,
    pub seed: u64,
    pub inputs: serde_json::Value,
    pub results: serde_json::Value,
    pub residuals: BTreeMap<String, ResidualCheck>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, inputs: serde_json::Value) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            inputs,
            results: serde_json::Value::Null,
            residuals: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn add_residual(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let pass = value < tolerance;
        self.residuals.insert(
            name.into(),
            ResidualCheck {
                value,
                tolerance,
                pass,
            },
        );
        self.pass &= pass;
    }

    /// Record a non-residual failure (e.g. a refused precondition).
    pub fn mark_failed(&mut self) {
        self.pass = false;
    }

    pub fn set_results(&mut self, results: serde_json::Value) {
        self.results = results;
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    /// Short human-readable summary (one line per residual).
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{}: {}\n",
            self.command,
            if self.pass { "PASS" } else { "FAIL" }
        );
        for (name, check) in &self.residuals {
            out.push_str(&format!(
                "  [{}] {name}: {:.3e} (tol {:.1e})\n",
                if check.pass { "ok" } else { "FAIL" },
                check.value,
                check.tolerance
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residuals_within_tolerance() {
        let mut report = Report::new("check", 7, serde_json::json!({}));
        report.add_residual("good", 1e-12, 1e-9);
        assert!(report.pass);
        report.add_residual("bad", 1e-3, 1e-9);
        assert!(!report.pass);
    }

    #[test]
    fn json_is_deterministic() {
        let build = || {
            let mut r = Report::new("check", 3, serde_json::json!({"b": 1, "a": 2}));
            r.add_residual("z", 0.5e-9, 1e-9);
            r.add_residual("a", 2e-10, 1e-9);
            r.set_results(serde_json::json!({"values": [1.0, 2.5]}));
            r.to_json()
        };
        assert_eq!(build(), build());
    }
}
