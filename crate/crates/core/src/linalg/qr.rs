//! Householder QR.

use super::dense::{norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Thin QR of a tall matrix (`rows >= cols`), returning `(Q, R)` with `Q` of
/// size `rows x cols` and `R` upper triangular with a nonnegative diagonal.
///
/// Fixing the sign of `diag(R)` makes `Q` Haar-distributed when the input has
/// i.i.d. Gaussian entries.
pub fn householder_qr(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "thin QR needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);

    for k in 0..n {
        let mut v: Vec<f64> = (k..m).map(|i| r.get(i, k)).collect();
        let alpha = norm2(&v);
        if alpha == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm = norm2(&v);
        for x in &mut v {
            *x /= vnorm;
        }
        // R[k.., k..] -= 2 v (v^T R[k.., k..])
        for j in k..n {
            let s: f64 = v.iter().enumerate().map(|(p, vp)| vp * r.get(k + p, j)).sum();
            for (p, vp) in v.iter().enumerate() {
                let val = r.get(k + p, j) - 2.0 * vp * s;
                r.set(k + p, j, val);
            }
        }
        reflectors.push(v);
    }

    // Accumulate Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    let mut q = DenseMatrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for k in (0..n).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for j in 0..n {
            let s: f64 = v.iter().enumerate().map(|(p, vp)| vp * q.get(k + p, j)).sum();
            for (p, vp) in v.iter().enumerate() {
                let val = q.get(k + p, j) - 2.0 * vp * s;
                q.set(k + p, j, val);
            }
        }
    }

    let mut r_thin = DenseMatrix::from_fn(n, n, |i, j| if j >= i { r.get(i, j) } else { 0.0 });
    for k in 0..n {
        if r_thin.get(k, k) < 0.0 {
            for j in 0..n {
                r_thin.set(k, j, -r_thin.get(k, j));
            }
            for i in 0..m {
                q.set(i, k, -q.get(i, k));
            }
        }
    }
    Ok((q, r_thin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_and_is_orthonormal() {
        let a = DenseMatrix::from_fn(6, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.5 + (i == j) as u8 as f64);
        let (q, r) = householder_qr(&a).unwrap();
        let qr = q.matmul(&r).unwrap();
        assert!(qr.max_abs_diff(&a) < 1e-12);
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(qtq.max_abs_diff(&DenseMatrix::identity(4)) < 1e-12);
        for k in 0..4 {
            assert!(r.get(k, k) >= 0.0);
        }
    }

    #[test]
    fn rejects_wide_input() {
        assert!(householder_qr(&DenseMatrix::zeros(2, 3)).is_err());
    }
}
