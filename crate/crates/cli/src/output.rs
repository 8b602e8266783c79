//! Tables, their CSV and JSON renderings, and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, Settings};
use crate::CliError;

/// Fixed 15-significant-digit rendering used in every output file.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

/// `x` rounded to the digits that `fmt_num` writes.
fn rounded(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

/// Named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Refuses to emit anything non-finite.
    pub fn check_finite(&self) -> Result<(), CliError> {
        for row in &self.rows {
            for (name, v) in self.columns.iter().zip(row) {
                if !v.is_finite() {
                    return Err(CliError::NonFinite { column: name, value: *v });
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| r.iter().map(|&v| rounded(v)).collect()).collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub kind: String,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedInfo {
    pub t0: f64,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteCounts {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Resolved solver and output settings recorded with each run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub branch: String,
    pub r_max: f64,
    pub t0: f64,
    pub t_min_table: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_log_step: f64,
    pub max_linear_step: f64,
    pub kmax: usize,
    pub nodes: usize,
    pub seed_order: usize,
    pub glaisher: f64,
    pub sigma0: f64,
    pub mass: f64,
    pub format: String,
    pub quick: bool,
}

/// What was run and with which settings. The wall-clock duration is kept
/// out of the serialized form so that identical runs give identical files;
/// it is reported on stderr instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub program: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config: ResolvedConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteCounts>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, settings: &Settings) -> Result<Self, CliError> {
        let cfg = settings.solver_config()?;
        Ok(Self {
            program: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            config: ResolvedConfig {
                lambda: settings.lambda,
                branch: settings.branch.name().to_string(),
                r_max: cfg.r_max,
                t0: cfg.seed_point(),
                t_min_table: cfg.t_min,
                rel_tol: cfg.rel_tol,
                abs_tol: cfg.abs_tol,
                max_log_step: cfg.max_log_step,
                max_linear_step: cfg.max_linear_step,
                kmax: settings.kmax,
                nodes: cfg.ff_nodes,
                seed_order: cfg.seed_order,
                glaisher: cfg.glaisher,
                sigma0: cfg.sigma0(),
                mass: settings.mass.unwrap_or(1.0),
                format: settings.format.to_string(),
                quick: settings.quick,
            },
            grid: None,
            seed: None,
            output: settings.output.as_ref().map(|p| p.display().to_string()),
            suite: None,
            wall_clock: Duration::ZERO,
        })
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Path of the manifest written next to a CSV file.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

/// Renders `table` in the requested format. CSV goes with a sidecar
/// manifest when written to a file; JSON nests it.
pub fn emit(table: &Table, manifest: &RunManifest, format: Format, output: Option<&Path>) -> Result<Option<String>, CliError> {
    table.check_finite()?;
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut v = table.to_json_value();
            v["manifest"] = manifest.to_json_value();
            pretty(&v)
        }
    };
    match output {
        Some(path) => {
            write_file(path, &text)?;
            if format == Format::Csv {
                write_file(&manifest_path(path), &pretty(&manifest.to_json_value()))?;
            }
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

/// Writes a plain-text log, with a sidecar manifest when it goes to a file.
pub fn emit_log(log: &str, manifest: &RunManifest, format: Format, output: Option<&Path>) -> Result<Option<String>, CliError> {
    let text = match format {
        Format::Csv => log.to_string(),
        Format::Json => {
            let lines: Vec<&str> = log.lines().collect();
            pretty(&json!({ "log": lines, "manifest": manifest.to_json_value() }))
        }
    };
    match output {
        Some(path) => {
            write_file(path, &text)?;
            if format == Format::Csv {
                write_file(&manifest_path(path), &pretty(&manifest.to_json_value()))?;
            }
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000000000e0");
        assert_eq!(fmt_num(-0.012345678901234567), "-1.23456789012346e-2");
        assert_eq!(rounded(0.1 + 0.2), 0.3);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![1.0, 2.5]);
        assert_eq!(t.to_csv(), "a,b\n1.00000000000000e0,2.50000000000000e0\n");
    }

    #[test]
    fn non_finite_refused() {
        let mut t = Table::new(vec!["a"]);
        t.push(vec![f64::NAN]);
        assert!(t.check_finite().is_err());
    }
}
