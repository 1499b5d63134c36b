use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::quantile_type7;
use crate::error::{Error, Result};
use crate::estimators::{base_statistic, EstimatorKind};
use crate::operator::{GroundTruth, LinearOperator};
use crate::rng::RandomSource;

/// Extra attempts for a trial whose draw is degenerate. Attempt `a` of trial
/// `i` uses stream `i + a * n_trials`.
pub const REDRAW_ATTEMPTS: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub kind: EstimatorKind,
    pub theta: f64,
    pub matrix_id: String,
    pub values: Vec<f64>,
    pub truth: GroundTruth,
    pub base_seed: u64,
}

/// Runs `f` on a pool of `workers` threads; `0` means one per logical core.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) fn check_theta(kind: EstimatorKind, theta: f64) -> Result<()> {
    let min = if kind == EstimatorKind::Counterbalance { 1.0 } else { 0.0 };
    if theta.is_finite() && theta >= min {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{kind} needs finite theta >= {min}, got {theta}"
        )))
    }
}

/// Base statistic of trial `i`, redrawing on degenerate draws.
/// Returns the stream of the first attempt on failure.
pub(crate) fn trial_base(
    op: &dyn LinearOperator,
    kind: EstimatorKind,
    seed: u64,
    stream: u64,
    stride: u64,
) -> Result<std::result::Result<f64, u64>> {
    for attempt in 0..=REDRAW_ATTEMPTS {
        let rng = RandomSource::new(seed, stream + attempt * stride);
        match base_statistic(op, kind, rng) {
            Ok(v) => return Ok(Ok(v)),
            Err(Error::DegenerateDraw { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(Err(stream))
}

pub(crate) fn collect_trials(
    results: Vec<Result<std::result::Result<f64, u64>>>,
    seed: u64,
) -> Result<Vec<f64>> {
    let total = results.len();
    let mut values = Vec::with_capacity(total);
    let mut failed = Vec::new();
    for r in results {
        match r? {
            Ok(v) => values.push(v),
            Err(stream) => failed.push(stream),
        }
    }
    if failed.is_empty() {
        Ok(values)
    } else {
        Err(Error::DegenerateBatch {
            count: failed.len(),
            total,
            seed,
            streams: failed.into_iter().take(16).collect(),
        })
    }
}

/// `n_trials` realizations of `theta * S(X)`; trial `i` draws from stream `i`
/// and values are stored in stream order whatever the worker count.
pub fn run_batch(
    op: &dyn LinearOperator,
    truth: &GroundTruth,
    kind: EstimatorKind,
    theta: f64,
    n_trials: usize,
    base_seed: u64,
    workers: usize,
) -> Result<TrialBatch> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be >= 1".into()));
    }
    check_theta(kind, theta)?;
    if kind.needs_adjoint() && !op.adjoint_available() {
        return Err(Error::MissingAdjoint {
            estimator: if kind == EstimatorKind::Dixon { "dixon" } else { "counterbalance" },
        });
    }
    let stride = n_trials as u64;
    let results = with_workers(workers, || {
        (0..stride)
            .into_par_iter()
            .map(|i| trial_base(op, kind, base_seed, i, stride))
            .collect::<Vec<_>>()
    })?;
    let values = collect_trials(results, base_seed)?
        .into_iter()
        .map(|s| theta * s)
        .collect();
    Ok(TrialBatch {
        kind,
        theta,
        matrix_id: String::new(),
        values,
        truth: truth.clone(),
        base_seed,
    })
}

impl TrialBatch {
    pub fn with_matrix_id(mut self, id: impl Into<String>) -> Self {
        self.matrix_id = id.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q01: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub q99: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub matrix_id: String,
    pub kind: EstimatorKind,
    pub theta: f64,
    pub n_trials: usize,
    /// Fraction of values `<= ||A||`.
    pub delta_real: f64,
    /// `mean |value - ||A|||`.
    pub mae: f64,
    /// `mae / ||A||`.
    pub rel_mae: f64,
    pub mean: f64,
    /// Sample standard deviation.
    pub std: f64,
    pub quantiles: Quantiles,
}

/// Mean and sample standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn summarize(batch: &TrialBatch) -> BenchSummary {
    let values = &batch.values;
    assert!(!values.is_empty(), "summarize needs a nonempty batch");
    let norm = batch.truth.spectral_norm;
    let n = values.len();
    let under = values.iter().filter(|v| **v <= norm).count();
    let mae = values.iter().map(|v| (v - norm).abs()).sum::<f64>() / n as f64;
    let (mean, std) = mean_std(values);
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p| quantile_type7(&sorted, p);
    BenchSummary {
        matrix_id: batch.matrix_id.clone(),
        kind: batch.kind,
        theta: batch.theta,
        n_trials: n,
        delta_real: under as f64 / n as f64,
        mae,
        rel_mae: mae / norm,
        mean,
        std,
        quantiles: Quantiles {
            q01: q(0.01),
            q05: q(0.05),
            q50: q(0.5),
            q95: q(0.95),
            q99: q(0.99),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `(bin_center, count)` pairs over equal-width bins on `[min, max]`.
    pub bins: Vec<(f64, usize)>,
    /// Set when every value is equal and a single bin was emitted.
    pub degenerate: bool,
}

pub fn histogram_data(batch: &TrialBatch, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("bins must be >= 2, got {bins}")));
    }
    let values = &batch.values;
    if values.is_empty() {
        return Err(Error::InvalidArgument("histogram of an empty batch".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Ok(Histogram {
            bins: vec![(lo, values.len())],
            degenerate: true,
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(Histogram {
        bins: counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (lo + (i as f64 + 0.5) * width, c))
            .collect(),
        degenerate: false,
    })
}
