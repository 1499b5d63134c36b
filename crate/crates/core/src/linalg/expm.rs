//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use super::dense::DenseMatrix;
use super::lu;
use crate::error::{Error, Result};

/// Largest 1-norm for which the unscaled [13/13] Padé approximant is accurate
/// to double precision.
const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let norm = a.norm_1();
    if !norm.is_finite() {
        return Err(Error::Domain("expm input is not finite".into()));
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = if squarings > 0 {
        a.scaled(0.5_f64.powi(squarings))
    } else {
        a.clone()
    };

    let b = &PADE_13;
    let a2 = a.matmul(&a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a4.matmul(&a2)?;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> DenseMatrix {
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { c0 } else { 0.0 };
                out.set(
                    i,
                    j,
                    c6 * a6.get(i, j) + c4 * a4.get(i, j) + c2 * a2.get(i, j) + id,
                );
            }
        }
        out
    };

    let u_inner = a6.matmul(&lin(b[13], b[11], b[9], 0.0))?;
    let u_tail = lin(b[7], b[5], b[3], b[1]);
    let u = a.matmul(&u_inner.add(&u_tail)?)?;

    let v_inner = a6.matmul(&lin(b[12], b[10], b[8], 0.0))?;
    let v = v_inner.add(&lin(b[6], b[4], b[2], b[0]))?;

    let p = v.add(&u)?;
    let q = v.sub(&u)?;
    let mut r = lu::solve(&q, &p)?;
    for _ in 0..squarings {
        r = r.matmul(&r)?;
    }
    Ok(r)
}
