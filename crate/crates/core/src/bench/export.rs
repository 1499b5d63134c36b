use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::batch::BenchSummary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Json,
    Csv,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "matrix_id",
    "kind",
    "theta",
    "n_trials",
    "delta_real",
    "mae",
    "mean",
    "std",
    "q01",
    "q05",
    "q50",
    "q95",
    "q99",
    "rel_mae",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn summaries_to_csv(summaries: &[BenchSummary]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for s in summaries {
        let q = &s.quantiles;
        let row = [
            csv_field(&s.matrix_id),
            s.kind.to_string(),
            s.theta.to_string(),
            s.n_trials.to_string(),
            s.delta_real.to_string(),
            s.mae.to_string(),
            s.mean.to_string(),
            s.std.to_string(),
            q.q01.to_string(),
            q.q05.to_string(),
            q.q50.to_string(),
            q.q95.to_string(),
            q.q99.to_string(),
            s.rel_mae.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn export_results(summaries: &[BenchSummary], path: &Path, format: ExportFormat) -> Result<()> {
    let text = match format {
        ExportFormat::Json => {
            let mut s = serde_json::to_string_pretty(summaries)?;
            s.push('\n');
            s
        }
        ExportFormat::Csv => summaries_to_csv(summaries),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
