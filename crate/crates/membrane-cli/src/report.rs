//! Report assembly and serialization.
//!
//! The canonical report is JSON with top-level blocks `config`,
//! `checks`, `tables`, `timings` and `timestamp`; CSV output carries
//! the effective configuration as `#`-prefixed comment lines followed
//! by the checks summary and every table. For a fixed configuration and
//! seed the JSON body is byte-identical between runs except for the
//! `timestamp` and the measured `timings`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use membrane::verify::VerificationReport;
use serde_json::Value;

use crate::config::{emit, OverrideRecord, RunConfig};

/// A named rectangular table; rows hold JSON scalars (numbers, strings,
/// booleans) so both writers render them without locale surprises.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// The effective configuration together with its provenance record.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConfigBlock {
    #[serde(flatten)]
    pub values: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub overrides: Vec<OverrideRecord>,
}

/// One full run report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Report {
    pub config: ConfigBlock,
    pub checks: Vec<VerificationReport>,
    pub tables: BTreeMap<String, Table>,
    /// Wall-clock seconds per stage; volatile between runs by nature.
    pub timings: BTreeMap<String, f64>,
    /// Seconds since the Unix epoch at write time; the one field a
    /// reproducibility comparison must ignore alongside `timings`.
    pub timestamp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    /// True when every check passed and no runtime error interrupted.
    pub fn all_passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// CSV rendering: effective config and provenance as `#` comments,
    /// then a `checks` summary table, then every named table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in emit(&self.values()).lines() {
            let _ = writeln!(out, "# {line}");
        }
        if let Some(file) = &self.config.file {
            let _ = writeln!(out, "# config_file = {file}");
        }
        for ov in &self.config.overrides {
            let _ = writeln!(
                out,
                "# override: {} file={} flag={}",
                ov.key, ov.file_value, ov.flag_value
            );
        }
        for (name, seconds) in &self.timings {
            let _ = writeln!(out, "# timing_seconds: {name} = {seconds}");
        }
        let _ = writeln!(out, "# timestamp = {}", self.timestamp);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "# error = {}", e.replace('\n', " "));
        }

        let _ = writeln!(out, "\n# table: checks");
        let _ = writeln!(out, "check_name,measured_defect,tolerance,passed");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_cell_str(&c.check_name),
                fmt_csv_f64(c.measured_defect),
                fmt_csv_f64(c.tolerance),
                c.passed
            );
        }
        for (name, table) in &self.tables {
            let _ = writeln!(out, "\n# table: {name}");
            let _ = writeln!(out, "{}", table.columns.join(","));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }

    fn values(&self) -> RunConfig {
        self.config.values.clone()
    }

    /// One human-readable verdict line per check, plus the error if the
    /// run was interrupted.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                if c.passed {
                    format!(
                        "PASS {} (defect {:.3e} <= tol {:.3e})",
                        c.check_name, c.measured_defect, c.tolerance
                    )
                } else {
                    format!(
                        "FAIL {} (defect {:.3e} > tol {:.3e})",
                        c.check_name, c.measured_defect, c.tolerance
                    )
                }
            })
            .collect();
        if let Some(e) = &self.error {
            lines.push(format!("ERROR {e}"));
        }
        lines
    }
}

/// Dot-decimal rendering for CSV, never locale-dependent, never in
/// scientific notation a spreadsheet would misparse. Uses the shortest
/// round-trip digits.
fn fmt_csv_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    fmt_csv_f64(f)
                } else {
                    n.to_string()
                }
            } else {
                n.to_string()
            }
        }
        Value::String(s) => csv_cell_str(s),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        other => csv_cell_str(&other.to_string()),
    }
}

fn csv_cell_str(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
