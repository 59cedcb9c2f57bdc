//! Report records and their JSON/CSV serialisation.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{ConditionReport, Extended};

use super::config::{ExperimentKind, OutputFormat};

pub const REPORT_SCHEMA: &str = "riesz-morrey/report/v1";

pub const RADIUS_CONVENTION: &str =
    "inner radius r: target norms are taken on B(x0, r) against phi2(x0, r)";

pub const CSV_HEADER: &str = "function_id,source_norm,target_norm,ratio,stable";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedEvidence,
    ConditionsFail,
    ConditionsHold,
    Vacuous,
    Inconclusive,
}

impl Verdict {
    /// Exit status of a run that produced this verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::BoundedEvidence | Verdict::ConditionsHold | Verdict::Vacuous => 0,
            Verdict::ConditionsFail | Verdict::Inconclusive => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub function_id: String,
    pub source_norm: Option<f64>,
    pub target_norm: Option<f64>,
    /// Ratio on the configured grid.
    pub ratio: Option<Extended>,
    /// Ratio on the doubled grid.
    pub ratio_refined: Option<Extended>,
    pub stable: bool,
    /// Zero source norm: the ratio carries no information.
    pub degenerate: bool,
    /// Radius (or half-line point) where the ratio peaked.
    pub at: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    pub fn failed(id: &str, e: &Error) -> Self {
        Row {
            function_id: id.to_string(),
            source_norm: None,
            target_norm: None,
            ratio: None,
            ratio_refined: None,
            stable: false,
            degenerate: false,
            at: None,
            error: Some(e.to_string()),
        }
    }

    pub fn degenerate(id: &str) -> Self {
        Row {
            function_id: id.to_string(),
            source_norm: Some(0.0),
            target_norm: Some(0.0),
            ratio: None,
            ratio_refined: None,
            stable: true,
            degenerate: true,
            at: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedbergRow {
    pub function_id: String,
    pub samples: usize,
    /// max over sampled (x, y) of |I f(y)| / (Mf(x)^{p/q} ‖f‖^{1 - p/q})
    pub max_constant: Extended,
    pub min_constant: f64,
    pub uniform: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub function_id: String,
    /// sup over r of ‖f χ_{2B}‖ divided by the far-field term.
    pub term1_over_term2: Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardySummary {
    pub b_estimate: Extended,
    pub divergent: bool,
    pub t_star: f64,
    pub stable: bool,
}

/// Counts only: wall time is not part of the report so that bytes stay reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunStats {
    pub rows: usize,
    pub row_errors: usize,
    pub conditions: usize,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub radius_convention: &'static str,
    /// Sufficiency conditions; every one must hold for bounded evidence.
    pub conditions: Vec<ConditionReport>,
    /// Reported alongside but not part of the verdict.
    pub diagnostics: Vec<ConditionReport>,
    pub rows: Vec<Row>,
    pub sup_ratio: Option<Extended>,
    pub sup_ratio_refined: Option<Extended>,
    pub ratio_stable: bool,
    /// sup ratio over all rows and both grids; the empirical operator constant.
    pub operator_constant: Option<Extended>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hedberg: Vec<HedbergRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<ChainRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hardy: Option<HardySummary>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
    pub stats: RunStats,
}

impl BoundednessReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let num = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
            let ratio = match r.ratio {
                None => String::new(),
                Some(Extended::Finite(v)) => v.to_string(),
                Some(Extended::Divergent) => "inf".to_string(),
            };
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&r.function_id),
                num(r.source_norm),
                num(r.target_norm),
                ratio,
                r.stable
            ));
        }
        s
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => Ok(self.to_csv()),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write the report to `path` in the given format.
pub fn emit_report(report: &BoundednessReport, format: OutputFormat, path: &Path) -> Result<()> {
    let text = report.render(format)?;
    let io = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    Ok(())
}
