//! Fréchet derivative of the matrix exponential as a matrix-free operator.
//!
//! For `H` of size `d x d` the operator maps `vec(X)` (row-major, length
//! `d^2`) to `vec(L(H, X))`, where `L(H, X)` is the top-right block of
//! `exp([[H, X], [0, H]])`. Its adjoint under the trace inner product is
//! `X -> L(H^T, X)`.

use super::{GroundTruth, LinearOperator};
use crate::error::{Error, Result};
use crate::linalg::{dot, expm, symmetric_eigen, DenseMatrix};
use crate::rng::RandomSource;

/// How `apply` evaluates the derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrechetMethod {
    /// Top-right block of a `2d x 2d` exponential.
    #[default]
    BlockExp,
    /// `Q (D o (Q^T X Q)) Q^T` with `D` the divided differences of `exp` at
    /// the eigenvalues of `H`. Requires symmetric `H`.
    Spectral,
}

#[derive(Debug, Clone)]
struct SpectralData {
    q: DenseMatrix,
    q_t: DenseMatrix,
    divided: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct FrechetExpmOperator {
    h: DenseMatrix,
    h_t: DenseMatrix,
    method: FrechetMethod,
    spectral: Option<SpectralData>,
    self_adjoint: bool,
}

/// Builds `H = scale (I kron T + T kron I)` with `T` the `n x n` tridiagonal
/// matrix with `2/(n-1)^2` on the diagonal and `-1/(n-1)^2` off it, and wraps
/// the derivative of `exp` at `H`. The operator acts on vectors of length `n^4`.
pub fn frechet_expm_operator(n: usize, scale: f64) -> Result<FrechetExpmOperator> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Fréchet grid size must be >= 2, got {n}"
        )));
    }
    if !scale.is_finite() {
        return Err(Error::InvalidArgument("scale must be finite".into()));
    }
    let h2 = ((n - 1) * (n - 1)) as f64;
    let t = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 / h2
        } else if i.abs_diff(j) == 1 {
            -1.0 / h2
        } else {
            0.0
        }
    });
    let eye = DenseMatrix::identity(n);
    let h = eye.kron(&t).add(&t.kron(&eye))?.scaled(scale);
    FrechetExpmOperator::new(h)
}

impl FrechetExpmOperator {
    /// Wraps the derivative of `exp` at an arbitrary square `h`.
    pub fn new(h: DenseMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let h_t = h.transpose();
        let mut op = Self {
            h,
            h_t,
            method: FrechetMethod::BlockExp,
            spectral: None,
            self_adjoint: false,
        };
        op.self_adjoint = op.check_self_adjoint()?;
        Ok(op)
    }

    /// Switches the evaluation route. `Spectral` needs a symmetric `H`.
    pub fn with_method(mut self, method: FrechetMethod) -> Result<Self> {
        if method == FrechetMethod::Spectral && self.spectral.is_none() {
            self.spectral = Some(self.spectral_data()?);
        }
        self.method = method;
        Ok(self)
    }

    pub fn method(&self) -> FrechetMethod {
        self.method
    }

    /// Side length `d` of `H`.
    pub fn inner_dim(&self) -> usize {
        self.h.rows()
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    /// Whether `<A v, u> = <v, A u>` held numerically at construction.
    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    fn check_self_adjoint(&self) -> Result<bool> {
        let len = self.cols();
        let mut s = RandomSource::new(0x5e1f_ad01, 0).stream();
        let u = s.normal_vector(len);
        let v = s.normal_vector(len);
        let av = self.apply(&v)?;
        let au = self.apply(&u)?;
        let lhs = dot(&av, &u);
        let rhs = dot(&v, &au);
        Ok((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE))
    }

    fn spectral_data(&self) -> Result<SpectralData> {
        if self.h.max_abs_diff(&self.h_t) > 0.0 {
            return Err(Error::InvalidArgument(
                "spectral Fréchet evaluation needs a symmetric H".into(),
            ));
        }
        let (lambda, q) = symmetric_eigen(&self.h)?;
        let d = lambda.len();
        let divided = DenseMatrix::from_fn(d, d, |a, b| exp_divided_difference(lambda[a], lambda[b]));
        Ok(SpectralData {
            q_t: q.transpose(),
            q,
            divided,
        })
    }

    /// Exact singular values `|(e^{l_a} - e^{l_b}) / (l_a - l_b)|` over all
    /// eigenvalue pairs of a symmetric `H`.
    pub fn ground_truth(&self) -> Result<GroundTruth> {
        let data = match &self.spectral {
            Some(d) => d.clone(),
            None => self.spectral_data()?,
        };
        let sv = data.divided.data().iter().map(|v| v.abs()).collect();
        GroundTruth::from_singular_values(sv)
    }

    fn reshape(&self, x: &[f64]) -> Result<DenseMatrix> {
        let d = self.inner_dim();
        if x.len() != d * d {
            return Err(Error::DimensionMismatch {
                context: "FrechetExpmOperator",
                expected: d * d,
                got: x.len(),
            });
        }
        DenseMatrix::new(d, d, x.to_vec())
    }

    fn block_exp(&self, h: &DenseMatrix, x: &DenseMatrix) -> Result<Vec<f64>> {
        let d = self.inner_dim();
        let mut big = DenseMatrix::zeros(2 * d, 2 * d);
        big.set_block(0, 0, h);
        big.set_block(0, d, x);
        big.set_block(d, d, h);
        let e = expm(&big)?;
        Ok(e.block(0, d, d, d).into_data())
    }

    fn spectral_apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        let s = self
            .spectral
            .as_ref()
            .expect("spectral data is built by with_method");
        let inner = s.q_t.matmul(x)?.matmul(&s.q)?;
        let d = self.inner_dim();
        let weighted = DenseMatrix::from_fn(d, d, |i, j| inner.get(i, j) * s.divided.get(i, j));
        Ok(s.q.matmul(&weighted)?.matmul(&s.q_t)?.into_data())
    }
}

/// `(e^a - e^b) / (a - b)`, evaluated as `e^b expm1(a - b) / (a - b)`.
fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        a.exp()
    } else {
        b.exp() * d.exp_m1() / d
    }
}

impl LinearOperator for FrechetExpmOperator {
    fn rows(&self) -> usize {
        self.inner_dim() * self.inner_dim()
    }

    fn cols(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let xm = self.reshape(x)?;
        match self.method {
            FrechetMethod::BlockExp => self.block_exp(&self.h, &xm),
            FrechetMethod::Spectral => self.spectral_apply(&xm),
        }
    }

    fn adjoint_available(&self) -> bool {
        true
    }

    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let ym = self.reshape(y)?;
        match self.method {
            FrechetMethod::BlockExp => self.block_exp(&self.h_t, &ym),
            // The spectral route only exists for symmetric H.
            FrechetMethod::Spectral => self.spectral_apply(&ym),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_scale_is_identity() {
        let op = frechet_expm_operator(2, 0.0).unwrap();
        assert_eq!(op.cols(), 16);
        let x: Vec<f64> = (0..16).map(|i| i as f64 - 7.5).collect();
        let y = op.apply(&x).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn wrong_length_is_contract_violation() {
        let op = frechet_expm_operator(2, -0.01).unwrap();
        assert!(matches!(
            op.apply(&[1.0; 5]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(frechet_expm_operator(1, -0.01).is_err());
    }

    #[test]
    fn divided_difference_limits() {
        assert_eq!(exp_divided_difference(0.3, 0.3), 0.3f64.exp());
        let v = exp_divided_difference(0.3 + 1e-9, 0.3);
        assert!((v - 0.3f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn non_symmetric_h_rejects_spectral() {
        let h = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let op = FrechetExpmOperator::new(h).unwrap();
        assert!(!op.is_self_adjoint());
        assert!(op.with_method(FrechetMethod::Spectral).is_err());
    }
}
