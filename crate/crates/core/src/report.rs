//! Suite reports: JSON, CSV and a human-readable table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::TruncationPolicy;
use crate::registry::VerificationReport;

/// Results of one `verify` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite_seed: u64,
    pub policy: TruncationPolicy,
    pub results: Vec<VerificationReport>,
}

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    anchor: &'a str,
    trials: usize,
    seed: u64,
    tolerance: f64,
    max_residual: f64,
    median_residual: f64,
    failures: usize,
    passed: bool,
    resampled: usize,
    empirical_order: Option<f64>,
    wall_time: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(format!("JSON encoding: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("JSON decoding: {e}")))
    }

    /// One row per identity; failure points are summarized by their count.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.results {
            w.serialize(CsvRow {
                id: &r.id,
                anchor: &r.anchor,
                trials: r.trials,
                seed: r.seed,
                tolerance: r.tolerance,
                max_residual: r.max_residual,
                median_residual: r.median_residual,
                failures: r.failures.len(),
                passed: r.passed,
                resampled: r.resampled,
                empirical_order: r.empirical_order,
                wall_time: r.wall_time,
            })
            .map_err(|e| Error::InvalidParameter(format!("CSV encoding: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(format!("CSV encoding: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(format!("CSV encoding: {e}")))
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "seed {}  tail_tol {:e}  max_factors {}",
            self.suite_seed, self.policy.tail_tol, self.policy.max_factors
        );
        let _ = writeln!(
            out,
            "{:<30} {:>6} {:>10} {:>10} {:>10} {:>6} {:>6}  status",
            "id", "trials", "tol", "max", "median", "fail", "resmp"
        );
        for r in &self.results {
            let _ = write!(
                out,
                "{:<30} {:>6} {:>10.1e} {:>10.2e} {:>10.2e} {:>6} {:>6}  {}",
                r.id,
                r.trials,
                r.tolerance,
                r.max_residual,
                r.median_residual,
                r.failures.len(),
                r.resampled,
                if r.passed { "PASS" } else { "FAIL" }
            );
            if let Some(o) = r.empirical_order {
                let _ = write!(out, "  order {o:.3}");
            }
            out.push('\n');
        }
        let total = self.results.len();
        let ok = self.results.iter().filter(|r| r.passed).count();
        let _ = writeln!(out, "{ok}/{total} identities passed");
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Human => Ok(self.to_human()),
        }
    }
}

/// Removes every `wall_time` field, leaving the deterministic part of a JSON report.
pub fn strip_wall_time(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time");
            map.values_mut().for_each(strip_wall_time);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}
