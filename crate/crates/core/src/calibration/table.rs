//! Inversion of the bounds into `theta(delta)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bound::g_cb_sup;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;

const BRACKET_LO: f64 = 1.0;
const BRACKET_HI: f64 = 64.0;
const BRACKET_MAX: f64 = 1e6;
/// Final bracket width of the bisection on `theta`.
pub const THETA_WIDTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMethod {
    ClosedForm,
    NumericInversion,
    OracleMc,
}

impl std::fmt::Display for CalibrationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CalibrationMethod::ClosedForm => "closed_form",
            CalibrationMethod::NumericInversion => "numeric_inversion",
            CalibrationMethod::OracleMc => "oracle_mc",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub delta: f64,
    pub kind: EstimatorKind,
    pub theta: f64,
    pub method: CalibrationMethod,
}

/// Serialized as a bare JSON array of entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CalibrationTable {
    pub entries: Vec<CalibrationEntry>,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {p}")))
    }
}

/// Smallest `theta >= 1` whose worst-case bound is at most `level`.
///
/// Vanilla and Dixon invert their closed forms; Counterbalance bisects the
/// supremum of `g_cb` over effective rank.
pub fn theta_for_level(kind: EstimatorKind, level: f64) -> Result<f64> {
    check_probability("level", level)?;
    let theta = match kind {
        EstimatorKind::Vanilla { k } => {
            if k == 0 {
                return Err(Error::InvalidArgument("vanilla needs k >= 1".into()));
            }
            (2.0 / PI).sqrt() * level.powf(-1.0 / k as f64)
        }
        EstimatorKind::Dixon => (2.0 / (PI * level)).cbrt(),
        EstimatorKind::Counterbalance => return bisect(g_cb_sup, level),
    };
    Ok(theta.max(1.0))
}

fn bisect(bound: impl Fn(f64) -> Result<f64>, level: f64) -> Result<f64> {
    let mut lo = BRACKET_LO;
    if bound(lo)? <= level {
        return Ok(lo);
    }
    let mut hi = BRACKET_HI;
    while bound(hi)? > level {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_MAX {
            return Err(Error::NoConvergence {
                what: "theta bracket",
                iterations: 0,
            });
        }
    }
    while hi - lo > THETA_WIDTH {
        let mid = 0.5 * (lo + hi);
        if bound(mid)? <= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn theta_for_delta(kind: EstimatorKind, delta: f64) -> Result<CalibrationEntry> {
    check_probability("delta", delta)?;
    let theta = theta_for_level(kind, delta)?;
    let method = match kind {
        EstimatorKind::Counterbalance => CalibrationMethod::NumericInversion,
        _ => CalibrationMethod::ClosedForm,
    };
    Ok(CalibrationEntry {
        delta,
        kind,
        theta,
        method,
    })
}

/// Where a `theta` used for a run came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaProvenance {
    ClosedForm,
    NumericInversion,
    OracleMc,
    Override,
}

impl From<CalibrationMethod> for ThetaProvenance {
    fn from(m: CalibrationMethod) -> Self {
        match m {
            CalibrationMethod::ClosedForm => ThetaProvenance::ClosedForm,
            CalibrationMethod::NumericInversion => ThetaProvenance::NumericInversion,
            CalibrationMethod::OracleMc => ThetaProvenance::OracleMc,
        }
    }
}

impl std::fmt::Display for ThetaProvenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThetaProvenance::ClosedForm => "closed_form",
            ThetaProvenance::NumericInversion => "numeric_inversion",
            ThetaProvenance::OracleMc => "oracle_mc",
            ThetaProvenance::Override => "override",
        })
    }
}

/// `theta_override` when given (must be `>= 1`), else the realizable `theta` for `delta`.
pub fn resolve_theta(
    kind: EstimatorKind,
    delta: f64,
    theta_override: Option<f64>,
) -> Result<(f64, ThetaProvenance)> {
    match theta_override {
        Some(t) if t.is_finite() && t >= 1.0 => Ok((t, ThetaProvenance::Override)),
        Some(t) => Err(Error::InvalidArgument(format!(
            "theta override must be finite and >= 1, got {t}"
        ))),
        None => {
            let e = theta_for_delta(kind, delta)?;
            Ok((e.theta, e.method.into()))
        }
    }
}

impl CalibrationTable {
    /// Realizable `theta` for every pair of `kinds` and `deltas`.
    pub fn build(kinds: &[EstimatorKind], deltas: &[f64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(kinds.len() * deltas.len());
        for &kind in kinds {
            for &delta in deltas {
                entries.push(theta_for_delta(kind, delta)?);
            }
        }
        Ok(Self { entries })
    }

    pub fn lookup(&self, kind: EstimatorKind, delta: f64) -> Option<&CalibrationEntry> {
        self.entries
            .iter()
            .find(|e| e.kind == kind && e.delta == delta)
    }

    /// Checks that `theta` is nonincreasing in `delta` for each kind.
    pub fn check_monotone(&self) -> Result<()> {
        for a in &self.entries {
            for b in &self.entries {
                if a.kind == b.kind && a.method == b.method && a.delta < b.delta && a.theta < b.theta {
                    return Err(Error::InvalidArgument(format!(
                        "{}: theta {} at delta {} is below theta {} at delta {}",
                        a.kind, a.theta, a.delta, b.theta, b.delta
                    )));
                }
            }
        }
        Ok(())
    }
}
