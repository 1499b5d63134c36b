use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "lu::solve",
            expected: n,
            got: b.rows(),
        });
    }
    let nrhs = b.cols();
    let mut lu = a.data().to_vec();
    let mut x = b.data().to_vec();

    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, lu[i * n + k].abs()))
            .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == 0.0 {
            return Err(Error::Domain("singular matrix in LU solve".into()));
        }
        if piv != k {
            for j in 0..n {
                lu.swap(k * n + j, piv * n + j);
            }
            for j in 0..nrhs {
                x.swap(k * nrhs + j, piv * nrhs + j);
            }
        }
        let d = lu[k * n + k];
        for i in k + 1..n {
            let f = lu[i * n + k] / d;
            if f == 0.0 {
                continue;
            }
            lu[i * n + k] = f;
            for j in k + 1..n {
                lu[i * n + j] -= f * lu[k * n + j];
            }
            for j in 0..nrhs {
                x[i * nrhs + j] -= f * x[k * nrhs + j];
            }
        }
    }
    for k in (0..n).rev() {
        let d = lu[k * n + k];
        for j in 0..nrhs {
            let mut s = x[k * nrhs + j];
            for p in k + 1..n {
                s -= lu[k * n + p] * x[p * nrhs + j];
            }
            x[k * nrhs + j] = s / d;
        }
    }
    DenseMatrix::new(n, nrhs, x)
}
