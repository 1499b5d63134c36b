//! One-sided (Hestenes) Jacobi SVD for small dense matrices.

use super::dense::{dot, DenseMatrix};
use crate::error::{Error, Result};

/// Largest `min(rows, cols)` accepted by the dense SVD.
pub const DENSE_SVD_CAP: usize = 2000;

const ROTATION_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct Svd {
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
    /// `rows x p` with `p = min(rows, cols)`.
    pub u: Option<DenseMatrix>,
    /// `cols x p`.
    pub v: Option<DenseMatrix>,
}

/// Computes singular values (and optionally the thin factors) of `a`.
///
/// Orthogonalizes the columns of `a` (or of `a^T` when `a` is wide) with plane
/// rotations until every pair satisfies `|a_i . a_j| <= 1e-12 ||a_i|| ||a_j||`.
pub fn jacobi_svd(a: &DenseMatrix, want_factors: bool) -> Result<Svd> {
    let p = a.rows().min(a.cols());
    if p > DENSE_SVD_CAP {
        return Err(Error::TooLarge {
            rows: a.rows(),
            cols: a.cols(),
            cap: DENSE_SVD_CAP,
        });
    }
    let wide = a.cols() > a.rows();
    let work = if wide { a.transpose() } else { a.clone() };
    let (m, n) = (work.rows(), work.cols());

    // Column-major copy: cols[j] is the j-th column.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();
    let mut vcols: Vec<Vec<f64>> = if want_factors {
        (0..n)
            .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        Vec::new()
    };
    let mut sq: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = sq[i];
                let beta = sq[j];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&cols[i], &cols[j]);
                if gamma.abs() <= ROTATION_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, i, j, c, s);
                if want_factors {
                    rotate(&mut vcols, i, j, c, s);
                }
                sq[i] = dot(&cols[i], &cols[i]);
                sq[j] = dot(&cols[j], &cols[j]);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "jacobi_svd",
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = cols.iter().map(|c| super::dense::norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let singular_values: Vec<f64> = order.iter().take(p).map(|&k| norms[k]).collect();

    if !want_factors {
        return Ok(Svd {
            singular_values,
            u: None,
            v: None,
        });
    }

    // Left factor: normalized columns; right factor: accumulated rotations.
    let left = DenseMatrix::from_fn(m, p, |i, k| {
        let idx = order[k];
        if norms[idx] > 0.0 {
            cols[idx][i] / norms[idx]
        } else {
            0.0
        }
    });
    let right = DenseMatrix::from_fn(n, p, |i, k| vcols[order[k]][i]);
    let (u, v) = if wide { (right, left) } else { (left, right) };
    Ok(Svd {
        singular_values,
        u: Some(u),
        v: Some(v),
    })
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    let (ci, cj) = (&mut lo[i], &mut hi[0]);
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
