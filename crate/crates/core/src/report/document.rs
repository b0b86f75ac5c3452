use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::JobConfig;
use super::ReportError;

/// One flat row of the CSV view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub job: String,
    pub metric: String,
    pub n_points: usize,
    pub tau: f64,
    /// Absent when the value is not finite.
    pub residual: Option<f64>,
    /// Whether `residual` is an interior-masked value.
    pub masked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Measured value; absent when not finite.
    pub value: Option<f64>,
    /// `"<"` or `">="` against `limit`.
    pub comparison: String,
    pub limit: f64,
}

impl Verdict {
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < limit,
            value: value.is_finite().then_some(value),
            comparison: "<".into(),
            limit,
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= limit,
            value: value.is_finite().then_some(value),
            comparison: ">=".into(),
            limit,
        }
    }

    pub fn label(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobResults {
    pub table: Vec<TableRow>,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub per_grid_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub config: JobConfig,
    pub results: JobResults,
    pub verdicts: Vec<Verdict>,
    pub timings: Timings,
}

impl ReportDocument {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        serde_json::to_string_pretty(self).map_err(|e| ReportError::Io(e.to_string()))
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> ReportError {
    ReportError::Io(format!("{}: {e}", path.display()))
}

/// Write `report.json` and `tables.csv` into `dir`, returning both paths.
pub fn serialize_report(
    doc: &ReportDocument,
    dir: &Path,
) -> Result<(PathBuf, PathBuf), ReportError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let json_path = dir.join("report.json");
    let csv_path = dir.join("tables.csv");
    let mut json = doc.to_json()?;
    json.push('\n');
    fs::write(&json_path, json).map_err(|e| io_err(&json_path, e))?;

    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    w.write_record(["job", "metric", "n_points", "tau", "residual", "verdict"])
        .map_err(|e| io_err(&csv_path, e))?;
    for row in &doc.results.table {
        w.write_record([
            row.job.clone(),
            row.metric.clone(),
            row.n_points.to_string(),
            row.tau.to_string(),
            row.residual.map(|r| format!("{r:e}")).unwrap_or_default(),
            row.verdict.clone().unwrap_or_default(),
        ])
        .map_err(|e| io_err(&csv_path, e))?;
    }
    w.flush().map_err(|e| io_err(&csv_path, e))?;
    Ok((json_path, csv_path))
}
