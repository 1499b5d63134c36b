//! Oracle `theta` from Monte Carlo quantiles of the base statistic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{base_statistic, EstimatorKind};
use crate::operator::{GroundTruth, LinearOperator};
use crate::rng::RandomSource;

/// Largest tolerated fraction of degenerate draws.
pub const MAX_DEGENERATE_FRACTION: f64 = 1e-3;

/// Linear interpolation of order statistics (Hyndman-Fan type 7).
///
/// `sorted` must be nonempty and ascending.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Base statistics on streams `rng.stream_id + i`, `i < n`, in stream order.
pub(crate) fn base_samples(
    op: &dyn LinearOperator,
    kind: EstimatorKind,
    rng: RandomSource,
    n: usize,
) -> Vec<Result<f64>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| base_statistic(op, kind, rng.with_stream(rng.stream_id + i)))
        .collect()
}

/// `theta` making the empirical underestimation frequency equal `delta`:
/// `||A||` divided by the `delta`-quantile of the base statistic.
pub fn oracle_theta(
    op: &dyn LinearOperator,
    truth: &GroundTruth,
    kind: EstimatorKind,
    delta: f64,
    n_trials: usize,
    rng: RandomSource,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if (n_trials as f64) < 10.0 / delta {
        return Err(Error::InvalidArgument(format!(
            "oracle calibration at delta = {delta} needs at least {} trials, got {n_trials}",
            (10.0 / delta).ceil()
        )));
    }
    let mut values = Vec::with_capacity(n_trials);
    let mut degenerate = Vec::new();
    for (i, r) in base_samples(op, kind, rng, n_trials).into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(Error::DegenerateDraw { .. }) => degenerate.push(rng.stream_id + i as u64),
            Err(e) => return Err(e),
        }
    }
    if degenerate.len() as f64 > MAX_DEGENERATE_FRACTION * n_trials as f64 {
        return Err(Error::DegenerateBatch {
            count: degenerate.len(),
            total: n_trials,
            seed: rng.seed,
            streams: degenerate.into_iter().take(16).collect(),
        });
    }
    values.sort_by(f64::total_cmp);
    let q = quantile_type7(&values, delta);
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "the {delta}-quantile of the base statistic is {q}; no finite theta exists"
        )));
    }
    Ok(truth.spectral_norm / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type7(&s, 0.0), 1.0);
        assert_eq!(quantile_type7(&s, 1.0), 4.0);
        assert!((quantile_type7(&s, 0.5) - 2.5).abs() < 1e-15);
        assert!((quantile_type7(&s, 0.1) - 1.3).abs() < 1e-15);
        assert_eq!(quantile_type7(&[7.0], 0.3), 7.0);
    }
}
