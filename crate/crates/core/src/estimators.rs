//! Randomized upper-bound statistics for `||A||`.
//!
//! Every statistic has the form `theta * S(X)` where `S` does not depend on
//! `theta`; [`base_statistic`] exposes `S` directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::operator::LinearOperator;
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    /// `theta * max_i ||A X_i||` over `k` Gaussian vectors.
    Vanilla { k: u32 },
    /// `theta * max(sqrt(||A^T A X_1||), ||A X_2||)`.
    Dixon,
    /// `theta * sqrt((||A^T A X_1|| / ||A X_1||)^2 + ||A X_2||^2)`.
    Counterbalance,
}

impl EstimatorKind {
    pub fn vanilla(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("vanilla needs k >= 1".into()));
        }
        Ok(EstimatorKind::Vanilla { k })
    }

    pub fn matvec_count(&self) -> usize {
        match self {
            EstimatorKind::Vanilla { k } => *k as usize,
            EstimatorKind::Dixon | EstimatorKind::Counterbalance => 3,
        }
    }

    /// Number of chained products that cannot run in parallel.
    pub fn sequential_depth(&self) -> usize {
        match self {
            EstimatorKind::Vanilla { .. } => 1,
            EstimatorKind::Dixon | EstimatorKind::Counterbalance => 2,
        }
    }

    pub fn needs_adjoint(&self) -> bool {
        !matches!(self, EstimatorKind::Vanilla { .. })
    }

    fn family(&self) -> &'static str {
        match self {
            EstimatorKind::Vanilla { .. } => "vanilla",
            EstimatorKind::Dixon => "dixon",
            EstimatorKind::Counterbalance => "counterbalance",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Vanilla { k } => write!(f, "vanilla{k}"),
            other => f.write_str(other.family()),
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    /// Accepts `counterbalance`, `dixon`, `vanilla<k>`, and bare `vanilla`
    /// (three vectors, matching the three-product budget of the others).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "counterbalance" | "cb" => Ok(EstimatorKind::Counterbalance),
            "dixon" => Ok(EstimatorKind::Dixon),
            "vanilla" => Ok(EstimatorKind::Vanilla { k: 3 }),
            _ => {
                if let Some(k) = s.strip_prefix("vanilla") {
                    let k: u32 = k.parse().map_err(|_| {
                        Error::InvalidArgument(format!("unknown estimator kind `{s}`"))
                    })?;
                    EstimatorKind::vanilla(k)
                } else {
                    Err(Error::InvalidArgument(format!("unknown estimator kind `{s}`")))
                }
            }
        }
    }
}

impl Serialize for EstimatorKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EstimatorKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One realization of a statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub value: f64,
    pub theta: f64,
    pub matvec_count: usize,
    pub sequential_depth: usize,
    pub seed: u64,
    pub stream_id: u64,
    pub kind: EstimatorKind,
}

fn require_adjoint(op: &dyn LinearOperator, estimator: &'static str) -> Result<()> {
    if op.adjoint_available() {
        Ok(())
    } else {
        Err(Error::MissingAdjoint { estimator })
    }
}

/// `S(X)` for `kind`, so that the statistic is `theta * S(X)`.
pub fn base_statistic(op: &dyn LinearOperator, kind: EstimatorKind, rng: RandomSource) -> Result<f64> {
    let n = op.cols();
    let mut stream = rng.stream();
    match kind {
        EstimatorKind::Vanilla { k } => {
            if k == 0 {
                return Err(Error::InvalidArgument("vanilla needs k >= 1".into()));
            }
            let mut best = 0.0_f64;
            for _ in 0..k {
                let x = stream.normal_vector(n);
                best = best.max(norm2(&op.apply(&x)?));
            }
            Ok(best)
        }
        EstimatorKind::Dixon => {
            require_adjoint(op, "dixon")?;
            let x1 = stream.normal_vector(n);
            let x2 = stream.normal_vector(n);
            let z = op.adjoint_apply(&op.apply(&x1)?)?;
            let y2 = op.apply(&x2)?;
            Ok(norm2(&z).sqrt().max(norm2(&y2)))
        }
        EstimatorKind::Counterbalance => {
            require_adjoint(op, "counterbalance")?;
            let x1 = stream.normal_vector(n);
            let x2 = stream.normal_vector(n);
            let y1 = op.apply(&x1)?;
            let y1_norm = norm2(&y1);
            if y1_norm == 0.0 {
                return Err(Error::DegenerateDraw {
                    seed: rng.seed,
                    stream_id: rng.stream_id,
                });
            }
            let z = op.adjoint_apply(&y1)?;
            let y2 = op.apply(&x2)?;
            Ok((norm2(&z) / y1_norm).hypot(norm2(&y2)))
        }
    }
}

/// Evaluates `kind` at `theta`.
pub fn estimate(
    op: &dyn LinearOperator,
    kind: EstimatorKind,
    theta: f64,
    rng: RandomSource,
) -> Result<EstimatorReport> {
    let min_theta = if kind == EstimatorKind::Counterbalance { 1.0 } else { 0.0 };
    if !(theta >= min_theta) || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{kind} needs finite theta >= {min_theta}, got {theta}"
        )));
    }
    let base = base_statistic(op, kind, rng)?;
    Ok(EstimatorReport {
        value: theta * base,
        theta,
        matvec_count: kind.matvec_count(),
        sequential_depth: kind.sequential_depth(),
        seed: rng.seed,
        stream_id: rng.stream_id,
        kind,
    })
}

pub fn vanilla(op: &dyn LinearOperator, theta: f64, k: u32, rng: RandomSource) -> Result<EstimatorReport> {
    estimate(op, EstimatorKind::vanilla(k)?, theta, rng)
}

pub fn dixon(op: &dyn LinearOperator, theta: f64, rng: RandomSource) -> Result<EstimatorReport> {
    estimate(op, EstimatorKind::Dixon, theta, rng)
}

pub fn counterbalance(op: &dyn LinearOperator, theta: f64, rng: RandomSource) -> Result<EstimatorReport> {
    estimate(op, EstimatorKind::Counterbalance, theta, rng)
}

/// `||A^T A Y|| / ||A Y||` for one Gaussian `Y`; never exceeds `||A||`.
pub fn power_ratio(op: &dyn LinearOperator, rng: RandomSource) -> Result<f64> {
    require_adjoint(op, "power_ratio")?;
    let y = rng.stream().normal_vector(op.cols());
    let ay = op.apply(&y)?;
    let ay_norm = norm2(&ay);
    if ay_norm == 0.0 {
        return Err(Error::DegenerateDraw {
            seed: rng.seed,
            stream_id: rng.stream_id,
        });
    }
    Ok(norm2(&op.adjoint_apply(&ay)?) / ay_norm)
}
