use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::batch::{collect_trials, mean_std, trial_base, with_workers};
use crate::calibration::theta_for_level;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::operator::{GroundTruth, LinearOperator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    /// Total products per trial; a multiple of 3.
    pub budget: usize,
    /// Estimator actually run; Vanilla uses `k = budget`.
    pub kind: EstimatorKind,
    /// Independent replicates maxed per trial.
    pub replicates: usize,
    pub mean: f64,
    pub std: f64,
    pub theta_used: f64,
    /// Level `delta^(1/replicates)` the per-replicate `theta` was calibrated to.
    pub replicate_level: f64,
}

/// Mean and spread of each estimator family as the product budget grows.
///
/// Vanilla at budget `m` draws `m` vectors at `theta` calibrated to `delta`.
/// Dixon and Counterbalance take the maximum of `r = m / 3` independent
/// replicates, each with `theta` solving `bound(theta) = delta^(1/r)`, so the
/// maximum fails with probability at most `delta`. Replicate `j` of trial `i`
/// draws from stream `i * r + j`, which makes budget 3 identical to a plain
/// [`run_batch`](super::run_batch).
#[allow(clippy::too_many_arguments)]
pub fn convergence_curve(
    op: &dyn LinearOperator,
    _truth: &GroundTruth,
    kind: EstimatorKind,
    budgets: &[usize],
    delta: f64,
    n_trials: usize,
    base_seed: u64,
    workers: usize,
) -> Result<Vec<ConvergencePoint>> {
    if budgets.is_empty() {
        return Err(Error::InvalidArgument("budgets must be nonempty".into()));
    }
    if let Some(b) = budgets.iter().find(|b| **b == 0 || **b % 3 != 0) {
        return Err(Error::InvalidArgument(format!(
            "budget {b} is not a positive multiple of 3"
        )));
    }
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(budgets.len());
    for &budget in budgets {
        let (run_kind, r) = match kind {
            EstimatorKind::Vanilla { .. } => (EstimatorKind::Vanilla { k: budget as u32 }, 1),
            other => (other, budget / 3),
        };
        let level = delta.powf(1.0 / r as f64);
        let theta = theta_for_level(run_kind, level)?;
        let r64 = r as u64;
        let total = n_trials as u64 * r64;
        let results = with_workers(workers, || {
            (0..total)
                .into_par_iter()
                .map(|s| trial_base(op, run_kind, base_seed, s, total))
                .collect::<Vec<_>>()
        })?;
        let base = collect_trials(results, base_seed)?;
        let values: Vec<f64> = base
            .chunks(r)
            .map(|c| theta * c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let (mean, std) = mean_std(&values);
        out.push(ConvergencePoint {
            budget,
            kind: run_kind,
            replicates: r,
            mean,
            std,
            theta_used: theta,
            replicate_level: level,
        });
    }
    Ok(out)
}
