//! A full benchmark run driven by a [`BenchConfig`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::batch::{histogram_data, run_batch, summarize, BenchSummary, Histogram};
use super::config::{resolve_matrix, BenchConfig};
use super::convergence::{convergence_curve, ConvergencePoint};
use super::export::{export_results, ExportFormat};
use crate::calibration::{resolve_theta, ThetaProvenance};
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;

#[derive(Debug, Clone, Default)]
pub struct CampaignOptions {
    /// Use `full_n_trials` instead of `n_trials`.
    pub full: bool,
    /// Overrides the config's worker count.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaRecord {
    pub kind: EstimatorKind,
    pub delta: f64,
    pub theta: f64,
    pub provenance: ThetaProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRecord {
    pub matrix_id: String,
    pub kind: EstimatorKind,
    pub theta: f64,
    pub spectral_norm: f64,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub matrix_id: String,
    pub spectral_norm: f64,
    pub delta: f64,
    pub n_trials: usize,
    pub base_seed: u64,
    /// How `theta` was chosen per budget.
    pub theta_rule: String,
    pub points: Vec<ConvergencePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub thetas: Vec<ThetaRecord>,
    pub summaries: Vec<BenchSummary>,
    pub histograms: Vec<HistogramRecord>,
    pub convergence: Vec<ConvergenceRecord>,
}

/// The config as run, embedded in the outputs. The worker count is left out
/// because it does not affect results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: BenchConfig,
    pub full: bool,
    pub n_trials_by_matrix: Vec<(String, usize)>,
    pub version: String,
}

const THETA_RULE: &str = "vanilla at budget m uses k = m with theta from the closed form at delta; \
dixon and counterbalance take the max of r = m/3 replicates, each with theta solving bound(theta) = delta^(1/r)";

pub fn run_campaign(cfg: &BenchConfig, opts: &CampaignOptions) -> Result<CampaignResult> {
    cfg.validate()?;
    let workers = opts.workers.unwrap_or(cfg.workers);
    let thetas = cfg
        .estimators
        .iter()
        .map(|&kind| {
            let (theta, provenance) =
                resolve_theta(kind, cfg.delta, cfg.theta_overrides.get(&kind).copied())?;
            Ok(ThetaRecord {
                kind,
                delta: cfg.delta,
                theta,
                provenance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::new();
    let mut histograms = Vec::new();
    let mut convergence = Vec::new();
    for entry in &cfg.matrices {
        let id = entry.id();
        let (op, truth) = resolve_matrix(entry)?;
        let n = cfg.trials_for(id, opts.full);
        for t in &thetas {
            let batch = run_batch(&*op, &truth, t.kind, t.theta, n, cfg.seed, workers)?.with_matrix_id(id);
            summaries.push(summarize(&batch));
            histograms.push(HistogramRecord {
                matrix_id: id.to_string(),
                kind: t.kind,
                theta: t.theta,
                spectral_norm: truth.spectral_norm,
                histogram: histogram_data(&batch, cfg.histogram_bins)?,
            });
        }
        if let Some(c) = cfg.convergence.as_ref().filter(|c| c.matrices.iter().any(|m| m == id)) {
            let mut points = Vec::new();
            for &kind in &cfg.estimators {
                points.extend(convergence_curve(
                    &*op, &truth, kind, &c.budgets, cfg.delta, c.n_trials, cfg.seed, workers,
                )?);
            }
            convergence.push(ConvergenceRecord {
                matrix_id: id.to_string(),
                spectral_norm: truth.spectral_norm,
                delta: cfg.delta,
                n_trials: c.n_trials,
                base_seed: cfg.seed,
                theta_rule: THETA_RULE.to_string(),
                points,
            });
        }
    }
    Ok(CampaignResult {
        thetas,
        summaries,
        histograms,
        convergence,
    })
}

/// Output files written by [`write_campaign`].
pub const OUTPUT_FILES: [&str; 6] = [
    "manifest.json",
    "thetas.json",
    "summary.json",
    "summary.csv",
    "histograms.json",
    "convergence.json",
];

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Refuses to touch a nonempty `dir` unless `force`.
pub fn prepare_output_dir(dir: &Path, force: bool) -> Result<()> {
    if dir.exists() {
        let nonempty = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .next()
            .is_some();
        if nonempty && !force {
            return Err(Error::OutputExists {
                path: dir.to_path_buf(),
            });
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_campaign(
    result: &CampaignResult,
    cfg: &BenchConfig,
    opts: &CampaignOptions,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let manifest = RunManifest {
        config: cfg.clone(),
        full: opts.full,
        n_trials_by_matrix: cfg
            .matrices
            .iter()
            .map(|m| (m.id().to_string(), cfg.trials_for(m.id(), opts.full)))
            .collect(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    write_json(dir, "manifest.json", &manifest)?;
    write_json(dir, "thetas.json", &result.thetas)?;
    export_results(&result.summaries, &dir.join("summary.json"), ExportFormat::Json)?;
    export_results(&result.summaries, &dir.join("summary.csv"), ExportFormat::Csv)?;
    write_json(dir, "histograms.json", &result.histograms)?;
    write_json(dir, "convergence.json", &result.convergence)?;
    Ok(OUTPUT_FILES.iter().map(|f| dir.join(f)).collect())
}
