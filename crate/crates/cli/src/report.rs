use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Pass when measured <= tolerance.
    pub fn le(name: &str, measured: f64, tolerance: f64) -> Check {
        Check { name: name.into(), measured, tolerance, pass: measured <= tolerance }
    }

    /// Informational entry that never fails; tolerance echoes infinity.
    pub fn info(name: &str, measured: f64) -> Check {
        Check { name: name.into(), measured, tolerance: f64::INFINITY, pass: true }
    }

    /// Pass when the condition holds; measured is 1/0 for held/failed.
    pub fn holds(name: &str, ok: bool) -> Check {
        Check { name: name.into(), measured: if ok { 1.0 } else { 0.0 }, tolerance: 1.0, pass: ok }
    }
}

/// Everything a rerun needs to reproduce the run, plus the results.
/// `wall_clock_seconds` is the only field allowed to differ between
/// identical runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub version: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
