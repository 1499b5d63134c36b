//! From a target failure probability `delta` to the inflation factor `theta`.

mod bound;
mod oracle;
mod table;

pub use bound::{
    dixon_bound, g_cb, g_cb_case1, g_cb_case2, g_cb_case3, g_cb_sup, g_cb_sup_detail, rho_grid,
    vanilla_bound, GCurve, SupResult, RHO_CAP, RHO_GRID_POINTS,
};
pub use oracle::{oracle_theta, quantile_type7, MAX_DEGENERATE_FRACTION};
pub use table::{
    resolve_theta, theta_for_delta, theta_for_level, CalibrationEntry, CalibrationMethod, CalibrationTable,
    ThetaProvenance, THETA_WIDTH,
};

use crate::estimators::EstimatorKind;

/// Worst-case bound on `P(T(theta, X) <= ||A||)` for `kind`.
pub fn worst_case_bound(kind: EstimatorKind, theta: f64) -> crate::Result<f64> {
    match kind {
        EstimatorKind::Vanilla { k } => Ok(vanilla_bound(theta, k)),
        EstimatorKind::Dixon => Ok(dixon_bound(theta)),
        EstimatorKind::Counterbalance => g_cb_sup(theta),
    }
}
