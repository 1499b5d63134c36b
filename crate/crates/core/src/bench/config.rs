//! Benchmark campaign configuration and the named test matrices.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::operator::{
    dense_svd, frechet_expm_operator, gen_synthetic, hilbert_operator, load_matrix,
    make_dense_operator, FrechetMethod, ForwardOnly, GroundTruth, LinearOperator, MatrixFormat,
    SpectrumSpec,
};

/// Seed of the random factors of the synthetic zoo matrices. Fixed so the
/// matrices do not change with the campaign seed.
pub const ZOO_SEED: u64 = 1;

pub const ZOO_IDS: [&str; 5] = ["hilbert", "rank2", "dominant0.1", "dominant0.5", "frechet"];

/// A zoo id, or a matrix file under a user-chosen id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixEntry {
    Zoo(String),
    File {
        id: String,
        file: PathBuf,
        /// Treat the matrix as forward-only (no transpose products).
        #[serde(default)]
        forward_only: bool,
    },
}

impl MatrixEntry {
    pub fn id(&self) -> &str {
        match self {
            MatrixEntry::Zoo(id) => id,
            MatrixEntry::File { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_n_trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub budgets: Vec<usize>,
    pub matrices: Vec<String>,
    pub n_trials: usize,
}

fn default_full_n_trials() -> usize {
    1_000_000
}

fn default_bins() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub matrices: Vec<MatrixEntry>,
    pub estimators: Vec<EstimatorKind>,
    pub delta: f64,
    /// Fixed `theta` per estimator, bypassing calibration.
    #[serde(default)]
    pub theta_overrides: BTreeMap<EstimatorKind, f64>,
    pub n_trials: usize,
    /// Trials per batch under `--full`.
    #[serde(default = "default_full_n_trials")]
    pub full_n_trials: usize,
    #[serde(default)]
    pub matrix_overrides: BTreeMap<String, MatrixOverride>,
    pub seed: u64,
    /// Worker threads; 0 means one per logical core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative matrix file paths are resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for m in &mut cfg.matrices {
            if let MatrixEntry::File { file, .. } = m {
                if file.is_relative() {
                    *file = base.join(&*file);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.matrices.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidArgument(
                "config needs at least one matrix and one estimator".into(),
            ));
        }
        if self.n_trials == 0 || self.full_n_trials == 0 {
            return Err(Error::InvalidArgument("n_trials must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.matrices {
            if let MatrixEntry::Zoo(id) = m {
                if !ZOO_IDS.contains(&id.as_str()) {
                    return Err(unknown_id(id));
                }
            }
            if !seen.insert(m.id()) {
                return Err(Error::InvalidArgument(format!(
                    "matrix id `{}` appears twice",
                    m.id()
                )));
            }
        }
        for id in self.matrix_overrides.keys() {
            if !seen.contains(id.as_str()) {
                return Err(unknown_id(id));
            }
        }
        for (kind, theta) in &self.theta_overrides {
            if !(theta.is_finite() && *theta >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "theta override for {kind} must be >= 1, got {theta}"
                )));
            }
        }
        if let Some(c) = &self.convergence {
            for id in &c.matrices {
                if !seen.contains(id.as_str()) {
                    return Err(unknown_id(id));
                }
            }
            if c.n_trials == 0 {
                return Err(Error::InvalidArgument("convergence n_trials must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Trials per batch for `matrix_id`.
    pub fn trials_for(&self, matrix_id: &str, full: bool) -> usize {
        let o = self.matrix_overrides.get(matrix_id);
        if full {
            o.and_then(|o| o.full_n_trials).unwrap_or(self.full_n_trials)
        } else {
            o.and_then(|o| o.n_trials).unwrap_or(self.n_trials)
        }
    }
}

fn unknown_id(id: &str) -> Error {
    Error::InvalidArgument(format!(
        "unknown matrix id `{id}` (known: {})",
        ZOO_IDS.join(", ")
    ))
}

fn dominant(level: f64) -> Vec<f64> {
    let mut sv = vec![1.0];
    sv.extend(std::iter::repeat_n(level, 10));
    sv
}

/// A named operator with its exact singular values.
pub fn zoo_matrix(id: &str) -> Result<(Box<dyn LinearOperator>, GroundTruth)> {
    let synthetic = |sv: Vec<f64>| -> Result<(Box<dyn LinearOperator>, GroundTruth)> {
        let spec = SpectrumSpec::new(sv, 100, 100)?;
        let (op, truth) = gen_synthetic(&spec, ZOO_SEED)?;
        Ok((Box::new(op), truth))
    };
    match id {
        "hilbert" => {
            let op = hilbert_operator(100)?;
            let truth = dense_svd(op.matrix())?;
            Ok((Box::new(op), truth))
        }
        "rank2" => synthetic(vec![1.0, 0.3]),
        "dominant0.1" => synthetic(dominant(0.1)),
        "dominant0.5" => synthetic(dominant(0.5)),
        "frechet" => {
            let op = frechet_expm_operator(10, -0.01)?.with_method(FrechetMethod::Spectral)?;
            let truth = op.ground_truth()?;
            Ok((Box::new(op), truth))
        }
        other => Err(unknown_id(other)),
    }
}

pub fn resolve_matrix(entry: &MatrixEntry) -> Result<(Box<dyn LinearOperator>, GroundTruth)> {
    match entry {
        MatrixEntry::Zoo(id) => zoo_matrix(id),
        MatrixEntry::File {
            file, forward_only, ..
        } => {
            let m = load_matrix(file, MatrixFormat::from_path(file))?;
            let truth = dense_svd(&m)?;
            let op = make_dense_operator(m);
            if *forward_only {
                Ok((Box::new(ForwardOnly(op)), truth))
            } else {
                Ok((Box::new(op), truth))
            }
        }
    }
}
