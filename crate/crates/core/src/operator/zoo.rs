//! Test matrices: synthetic spectra and Hilbert-type matrices.

use serde::{Deserialize, Serialize};

use super::{make_dense_operator, DenseOperator, GroundTruth};
use crate::error::{Error, Result};
use crate::linalg::{householder_qr, DenseMatrix};
use crate::rng::RandomSource;

/// Nonzero singular values of a synthetic `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub singular_values: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl SpectrumSpec {
    pub fn new(singular_values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        let spec = Self {
            singular_values,
            rows,
            cols,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let sv = &self.singular_values;
        if sv.is_empty() {
            return Err(Error::InvalidSpectrum("no singular values given".into()));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidSpectrum("shape must be positive".into()));
        }
        if sv.len() > self.rows.min(self.cols) {
            return Err(Error::InvalidSpectrum(format!(
                "{} singular values do not fit a {}x{} matrix",
                sv.len(),
                self.rows,
                self.cols
            )));
        }
        if let Some(bad) = sv.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "singular values must be positive and finite, got {bad}"
            )));
        }
        if let Some(w) = sv.windows(2).find(|w| w[1] > w[0]) {
            return Err(Error::InvalidSpectrum(format!(
                "singular values must be nonincreasing, got {} before {}",
                w[0], w[1]
            )));
        }
        Ok(())
    }

    /// `sum sigma_i^2 / sigma_1^2`.
    pub fn effective_rank(&self) -> f64 {
        let s1 = self.singular_values[0];
        self.singular_values.iter().map(|s| (s / s1).powi(2)).sum()
    }
}

/// Dense `A = U diag(sigma) V^T` with `U`, `V` the sign-fixed QR factors of
/// i.i.d. Gaussian matrices drawn from stream 0 of `seed`.
pub fn gen_synthetic(spec: &SpectrumSpec, seed: u64) -> Result<(DenseOperator, GroundTruth)> {
    spec.validate()?;
    let k = spec.singular_values.len();
    let mut stream = RandomSource::new(seed, 0).stream();
    let gu = DenseMatrix::new(spec.rows, k, stream.normal_vector(spec.rows * k))?;
    let gv = DenseMatrix::new(spec.cols, k, stream.normal_vector(spec.cols * k))?;
    let (u, _) = householder_qr(&gu)?;
    let (v, _) = householder_qr(&gv)?;
    let us = DenseMatrix::from_fn(spec.rows, k, |i, j| u.get(i, j) * spec.singular_values[j]);
    let a = us.matmul(&v.transpose())?;
    let truth = GroundTruth::from_singular_values(spec.singular_values.clone())?;
    Ok((make_dense_operator(a), truth))
}

/// Indexing convention for `A_ij = 1/(i + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertIndexing {
    /// The classical Hilbert matrix `1/(i + j - 1)` with 1-based indices,
    /// i.e. `1/(i + j)` over `i, j >= 0` shifted so the corner entry is 1.
    #[default]
    Classical,
    /// `1/(i + j)` with 1-based indices; the corner entry is 1/2.
    OneBased,
}

pub fn hilbert_matrix(n: usize, indexing: HilbertIndexing) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("Hilbert size must be >= 1".into()));
    }
    let offset = match indexing {
        HilbertIndexing::Classical => 1.0,
        HilbertIndexing::OneBased => 2.0,
    };
    Ok(DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i as f64 + j as f64 + offset)))
}

/// Hilbert operator in the classical convention.
pub fn hilbert_operator(n: usize) -> Result<DenseOperator> {
    hilbert_matrix(n, HilbertIndexing::Classical).map(make_dense_operator)
}
