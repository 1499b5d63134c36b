//! The matvec-only operator contract, concrete operators, and the dense
//! ground-truth oracle.

mod frechet;
mod io;
mod zoo;

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, DenseMatrix};

pub use frechet::{frechet_expm_operator, FrechetExpmOperator, FrechetMethod};
pub use io::{load_matrix, save_matrix, MatrixFormat};
pub use zoo::{gen_synthetic, hilbert_matrix, hilbert_operator, HilbertIndexing, SpectrumSpec};

/// Access to a matrix through products only.
///
/// Implementations must be deterministic: the same input yields bit-identical
/// output. They are shared across worker threads.
pub trait LinearOperator: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `A x` with `x.len() == cols()`.
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn adjoint_available(&self) -> bool {
        false
    }

    /// `A^T y` with `y.len() == rows()`.
    fn adjoint_apply(&self, _y: &[f64]) -> Result<Vec<f64>> {
        Err(Error::MissingAdjoint {
            estimator: "adjoint_apply",
        })
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(x)
    }
    fn adjoint_available(&self) -> bool {
        (**self).adjoint_available()
    }
    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        (**self).adjoint_apply(y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn rows(&self) -> usize {
        (**self).rows()
    }
    fn cols(&self) -> usize {
        (**self).cols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(x)
    }
    fn adjoint_available(&self) -> bool {
        (**self).adjoint_available()
    }
    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        (**self).adjoint_apply(y)
    }
}

/// A dense matrix behind the operator contract.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DenseMatrix,
}

impl DenseOperator {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }
}

pub fn make_dense_operator(matrix: DenseMatrix) -> DenseOperator {
    DenseOperator { matrix }
}

impl LinearOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.matrix.rows()
    }
    fn cols(&self) -> usize {
        self.matrix.cols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec(x)
    }
    fn adjoint_available(&self) -> bool {
        true
    }
    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec_transpose(y)
    }
}

/// `diag(d)` as an operator. Gaussian-input statistics depend on a matrix only
/// through its singular values, so this stands in cheaply for any matrix with
/// the same spectrum.
#[derive(Debug, Clone)]
pub struct DiagonalOperator {
    diag: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument(
                "diagonal must be nonempty and finite".into(),
            ));
        }
        Ok(Self { diag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }
}

impl LinearOperator for DiagonalOperator {
    fn rows(&self) -> usize {
        self.diag.len()
    }
    fn cols(&self) -> usize {
        self.diag.len()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.diag.len() {
            return Err(Error::DimensionMismatch {
                context: "DiagonalOperator::apply",
                expected: self.diag.len(),
                got: x.len(),
            });
        }
        Ok(x.iter().zip(&self.diag).map(|(a, b)| a * b).collect())
    }
    fn adjoint_available(&self) -> bool {
        true
    }
    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.apply(y)
    }
}

/// Hides the adjoint of the wrapped operator.
#[derive(Debug, Clone)]
pub struct ForwardOnly<O>(pub O);

impl<O: LinearOperator> LinearOperator for ForwardOnly<O> {
    fn rows(&self) -> usize {
        self.0.rows()
    }
    fn cols(&self) -> usize {
        self.0.cols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.apply(x)
    }
}

/// Counts forward and adjoint products passing through it.
pub struct CountingOperator<O> {
    inner: O,
    applies: AtomicUsize,
    adjoint_applies: AtomicUsize,
}

impl<O: LinearOperator> CountingOperator<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            applies: AtomicUsize::new(0),
            adjoint_applies: AtomicUsize::new(0),
        }
    }

    pub fn applies(&self) -> usize {
        self.applies.load(Ordering::Relaxed)
    }

    pub fn adjoint_applies(&self) -> usize {
        self.adjoint_applies.load(Ordering::Relaxed)
    }

    pub fn total(&self) -> usize {
        self.applies() + self.adjoint_applies()
    }

    pub fn reset(&self) {
        self.applies.store(0, Ordering::Relaxed);
        self.adjoint_applies.store(0, Ordering::Relaxed);
    }
}

impl<O: LinearOperator> LinearOperator for CountingOperator<O> {
    fn rows(&self) -> usize {
        self.inner.rows()
    }
    fn cols(&self) -> usize {
        self.inner.cols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.applies.fetch_add(1, Ordering::Relaxed);
        self.inner.apply(x)
    }
    fn adjoint_available(&self) -> bool {
        self.inner.adjoint_available()
    }
    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.adjoint_applies.fetch_add(1, Ordering::Relaxed);
        self.inner.adjoint_apply(y)
    }
}

/// Exact spectral quantities of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spectral_norm: f64,
    pub frobenius_norm: f64,
    pub effective_rank: f64,
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
}

impl GroundTruth {
    pub fn from_singular_values(mut singular_values: Vec<f64>) -> Result<Self> {
        if singular_values.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidSpectrum(
                "singular values must be finite and nonnegative".into(),
            ));
        }
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let spectral_norm = singular_values.first().copied().unwrap_or(0.0);
        if spectral_norm == 0.0 {
            return Err(Error::InvalidSpectrum(
                "zero matrix has no effective rank".into(),
            ));
        }
        let fro_sq: f64 = singular_values.iter().map(|s| s * s).sum();
        Ok(Self {
            spectral_norm,
            frobenius_norm: fro_sq.sqrt(),
            effective_rank: fro_sq / (spectral_norm * spectral_norm),
            singular_values,
        })
    }
}

/// Singular values of a dense matrix by one-sided Jacobi, packaged as ground truth.
pub fn dense_svd(m: &DenseMatrix) -> Result<GroundTruth> {
    let svd = jacobi_svd(m, false)?;
    GroundTruth::from_singular_values(svd.singular_values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_apply() {
        let op = make_dense_operator(DenseMatrix::identity(2));
        assert_eq!(op.apply(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn shift_adjoint() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let op = make_dense_operator(m);
        assert_eq!(op.adjoint_apply(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn diagonal_action() {
        let op = make_dense_operator(DenseMatrix::from_diag(&[1.0, 0.3]));
        assert_eq!(op.apply(&[1.0, 1.0]).unwrap(), vec![1.0, 0.3]);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let op = make_dense_operator(DenseMatrix::identity(2));
        assert!(matches!(
            op.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(op.adjoint_apply(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn forward_only_hides_adjoint() {
        let op = ForwardOnly(make_dense_operator(DenseMatrix::identity(2)));
        assert!(!op.adjoint_available());
        assert!(matches!(
            op.adjoint_apply(&[1.0, 0.0]),
            Err(Error::MissingAdjoint { .. })
        ));
    }

    #[test]
    fn svd_of_diag() {
        let gt = dense_svd(&DenseMatrix::from_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(gt.spectral_norm, 3.0);
        assert!((gt.effective_rank - 10.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_truth_is_error() {
        assert!(dense_svd(&DenseMatrix::zeros(2, 2)).is_err());
    }
}
