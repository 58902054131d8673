//! Self-describing JSON reports and CSV plot data.
//!
//! `report.json` is deterministic for a fixed config and seed: field
//! order is fixed by the struct definitions, maps are sorted, and no
//! wall-clock data enters the file (timing is printed to the console by
//! the driver instead).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// How `value` relates to `expected` for the check to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value - expected| ≤ tolerance`.
    Abs,
    /// `value ≥ expected - tolerance`.
    Ge,
    /// `value ≤ expected + tolerance`.
    Le,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (value - expected).abs() <= tolerance;
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            comparison: Comparison::Abs,
            pass,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = value >= expected - tolerance;
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            comparison: Comparison::Ge,
            pass,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = value <= expected + tolerance;
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            comparison: Comparison::Le,
            pass,
        }
    }
}

/// A CSV emitted next to the report, with its column documentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvInfo {
    pub file: String,
    pub columns: Vec<String>,
    pub description: String,
}

/// A truncation-convergence data point (also mirrored into CSVs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Convergence {
    pub name: String,
    pub parameter: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub csv_files: Vec<CsvInfo>,
    pub convergence: Vec<Convergence>,
    pub pass: bool,
}

impl Report {
    pub fn new(experiment: impl Into<String>, config: BTreeMap<String, String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            config,
            checks: Vec::new(),
            csv_files: Vec::new(),
            convergence: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// Merge a sub-report under a name prefix (used by `all`).
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.push(c);
        }
        self.csv_files.extend(other.csv_files);
        for mut c in other.convergence {
            c.name = format!("{prefix}/{}", c.name);
            self.convergence.push(c);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join("report.json"))?;
        f.write_all(self.to_json().as_bytes())
    }
}

/// Write a CSV file and return its metadata for the report.
pub fn write_csv(
    dir: &Path,
    file: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
    description: &str,
) -> std::io::Result<CsvInfo> {
    std::fs::create_dir_all(dir)?;
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(dir.join(file), out)?;
    Ok(CsvInfo {
        file: file.to_string(),
        columns: columns.iter().map(|s| s.to_string()).collect(),
        description: description.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::close("a", 1.0, 1.0 + 1e-10, 1e-9).pass);
        assert!(!Check::close("a", 1.0, 1.1, 1e-9).pass);
        assert!(Check::at_least("b", -1e-10, 0.0, 1e-9).pass);
        assert!(!Check::at_least("b", -1e-8, 0.0, 1e-9).pass);
        assert!(Check::at_most("c", 0.5, 0.5, 0.0).pass);
    }

    #[test]
    fn round_trip_preserves_config_echo() {
        let mut config = BTreeMap::new();
        config.insert("window".to_string(), "8".to_string());
        config.insert("seed".to_string(), "1".to_string());
        let mut report = Report::new("zmetric", config.clone());
        report.push(Check::close("x", 0.0, 0.0, 1e-9));
        let parsed = Report::from_json(&report.to_json()).unwrap();
        assert_eq!(parsed.config, config);
        assert_eq!(parsed.schema_version, SCHEMA_VERSION);
        assert!(parsed.pass);
    }
}
