use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sphere_sapt::fit::SlopeFit;

use crate::CliError;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub ci95: f64,
    pub n_points: usize,
    pub intercept: f64,
    pub residual: f64,
}

impl From<&SlopeFit> for FitSummary {
    fn from(f: &SlopeFit) -> Self {
        Self {
            slope: f.slope,
            ci95: f.ci95,
            n_points: f.n_points,
            intercept: f.intercept,
            residual: f.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity (a slope for fitted checks).
    pub value: f64,
    /// Human-readable target, e.g. `-2 +- 0.3` or `< 1e-10`.
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < bound,
            value,
            target: format!("< {bound:e}"),
            fit: None,
        }
    }

    pub fn equals(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: (value - expected).abs() <= tol,
            value,
            target: format!("{expected} +- {tol:e}"),
            fit: None,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, target: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            value: if passed { 1.0 } else { 0.0 },
            target: target.into(),
            fit: None,
        }
    }

    pub fn slope(name: impl Into<String>, fit: &SlopeFit, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: fit.within(target, tol),
            value: fit.slope,
            target: format!("{target} +- {tol}"),
            fit: Some(fit.into()),
        }
    }
}

/// Rows of one CSV file.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Output of one subcommand before it is written.
#[derive(Debug)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub table: Table,
    pub results: serde_json::Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: serde_json::Value,
    pub seed: u64,
    pub wall_time_s: f64,
    pub passed: bool,
    pub checks: &'a [Check],
    pub results: &'a serde_json::Value,
}

#[derive(Debug, Clone)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outputs(dir: &Path, command: &str, table: &Table, summary: &Summary) -> Result<Written, CliError> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{command}.csv"));
    let json = dir.join(format!("{command}.json"));
    write_csv(&csv, table)?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(&json, text)?;
    Ok(Written { csv, json })
}

/// Shortest round-trip formatting, so equal values give equal bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}
