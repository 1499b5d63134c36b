//! Upper bounds on the underestimation probability `P(T(theta, X) <= ||A||)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{chi2_1_cdf, integrate_with, wchi2_pdf_unchecked, QuadConfig, DEFAULT_TOL};

/// Effective rank above which the fourth-moment tail `theta^-4 / 8` applies.
pub const RHO_CAP: f64 = 7.0;

/// Points of the log-spaced effective-rank grid used by [`g_cb_sup`].
pub const RHO_GRID_POINTS: usize = 2000;

const GOLDEN_TOL: f64 = 1e-6;
const INNER_REL_TOL: f64 = 1e-11;

fn check_theta_rho(theta: f64, rho: f64) -> Result<()> {
    if !(theta >= 1.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be >= 1, got {theta}")));
    }
    if !(rho >= 1.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("rho must be >= 1, got {rho}")));
    }
    Ok(())
}

/// `chi^2_1((rho - 1) t / (1 - t))`, the power-ratio tail at level `t`.
fn ratio_tail(rho_minus_one: f64, t: f64) -> f64 {
    if rho_minus_one == 0.0 || t <= 0.0 {
        return 0.0;
    }
    let gap = 1.0 - t;
    if gap <= 0.0 {
        return 1.0;
    }
    chi2_1_cdf(rho_minus_one * t / gap)
}

fn outer_cfg() -> QuadConfig {
    QuadConfig {
        abs_tol: DEFAULT_TOL,
        ..QuadConfig::default()
    }
}

/// `theta^-4 / 8`, valid for `rho >= 7`.
pub fn g_cb_case1(theta: f64) -> f64 {
    theta.powi(-4) / 8.0
}

/// `int_0^e chi^2_1((rho-1) t/(1-t)) p_{(1, rho-1)}(e - t) dt` with `e = theta^-2`,
/// valid for `1 + e <= rho <= 7`. Evaluated under `t = e sin^2(phi)`.
pub fn g_cb_case2(theta: f64, rho: f64) -> Result<f64> {
    check_theta_rho(theta, rho)?;
    let e = theta.powi(-2);
    let alpha = rho - 1.0;
    if alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "the convolution bound needs rho > 1, got {rho}"
        )));
    }
    let inner_tol = INNER_REL_TOL / alpha.sqrt();
    let failure = std::cell::Cell::new(None);
    let integrand = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let t = e * s * s;
        let rest = e * c * c;
        let density = match wchi2_pdf_unchecked(alpha, rest, inner_tol) {
            Ok(v) => v,
            Err(err) => {
                failure.set(Some(err));
                f64::NAN
            }
        };
        ratio_tail(alpha, t) * density * 2.0 * e * s * c
    };
    let result = integrate_with(integrand, 0.0, FRAC_PI_2, &outer_cfg());
    if let Some(err) = failure.take() {
        return Err(err);
    }
    Ok(result?.value.clamp(0.0, 1.0))
}

/// `int_0^e chi^2_1((rho-1) t/(1-t)) p_{(1,0)}((e - t)/rho) dt` with
/// `e = theta^-2`, valid for `1 <= rho < 1 + e`.
///
/// Under `t = e sin^2(phi)` the chi-squared density factor times the Jacobian
/// simplifies to `2 sqrt(e rho / (2 pi)) sin(phi) exp(-e cos^2(phi) / (2 rho))`.
pub fn g_cb_case3(theta: f64, rho: f64) -> Result<f64> {
    check_theta_rho(theta, rho)?;
    let e = theta.powi(-2);
    let scale = 2.0 * (e * rho / (2.0 * PI)).sqrt();
    let integrand = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let t = e * s * s;
        ratio_tail(rho - 1.0, t) * scale * s * (-e * c * c / (2.0 * rho)).exp()
    };
    Ok(integrate_with(integrand, 0.0, FRAC_PI_2, &outer_cfg())?
        .value
        .clamp(0.0, 1.0))
}

/// Bound on `P(T^cb(theta, X) <= ||A||)` for a matrix of effective rank `rho`.
pub fn g_cb(theta: f64, rho: f64) -> Result<f64> {
    check_theta_rho(theta, rho)?;
    let e = theta.powi(-2);
    if rho > RHO_CAP {
        Ok(g_cb_case1(theta))
    } else if rho == RHO_CAP {
        // Both pieces bound the same probability here.
        Ok(g_cb_case1(theta).min(g_cb_case2(theta, rho)?))
    } else if rho >= 1.0 + e {
        g_cb_case2(theta, rho)
    } else {
        g_cb_case3(theta, rho)
    }
}

/// The maximizer found by [`g_cb_sup_detail`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    /// Effective rank attaining `value`; `None` when the `rho >= 7` tail dominates.
    pub rho: Option<f64>,
}

/// Log-spaced grid of [`RHO_GRID_POINTS`] points on `[1, 7]`, endpoints included.
pub fn rho_grid() -> Vec<f64> {
    let n = RHO_GRID_POINTS;
    let log_cap = RHO_CAP.ln();
    (0..n)
        .map(|i| {
            if i == n - 1 {
                RHO_CAP
            } else {
                (log_cap * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

fn golden_max(theta: f64, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = g_cb(theta, c)?;
    let mut fd = g_cb(theta, d)?;
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g_cb(theta, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g_cb(theta, d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// `sup_rho g_cb(theta, rho)` with the maximizing effective rank.
pub fn g_cb_sup_detail(theta: f64) -> Result<SupResult> {
    check_theta_rho(theta, 1.0)?;
    let grid = rho_grid();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&rho| g_cb(theta, rho))
        .collect::<Result<_>>()?;
    let (mut best_i, mut best) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best_i = i;
            best = v;
        }
    }
    let mut best_rho = grid[best_i];
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(grid.len() - 1)];
    let (rho, v) = golden_max(theta, lo, hi)?;
    if v > best {
        best = v;
        best_rho = rho;
    }
    let tail = g_cb_case1(theta);
    Ok(if tail > best {
        SupResult {
            value: tail,
            rho: None,
        }
    } else {
        SupResult {
            value: best,
            rho: Some(best_rho),
        }
    })
}

/// `sup_rho g_cb(theta, rho)`: the bound that holds for every matrix.
pub fn g_cb_sup(theta: f64) -> Result<f64> {
    g_cb_sup_detail(theta).map(|s| s.value)
}

/// `(sqrt(2/pi) / theta)^k`, the bound for the maximum of `k` Gaussian norms.
pub fn vanilla_bound(theta: f64, k: u32) -> f64 {
    ((2.0 / PI).sqrt() / theta).powi(k as i32).min(1.0)
}

/// `(2/pi) theta^-3`.
pub fn dixon_bound(theta: f64) -> f64 {
    (2.0 / PI * theta.powi(-3)).min(1.0)
}

/// Worst-case bound curve over a grid of `theta` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GCurve {
    pub theta_grid: Vec<f64>,
    pub g_values: Vec<f64>,
    pub rho_cap: f64,
}

impl GCurve {
    pub fn compute(theta_grid: Vec<f64>) -> Result<Self> {
        if theta_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "theta grid must be strictly increasing".into(),
            ));
        }
        let g_values = theta_grid
            .iter()
            .map(|&t| g_cb_sup(t))
            .collect::<Result<_>>()?;
        Ok(Self {
            theta_grid,
            g_values,
            rho_cap: RHO_CAP,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case1_value() {
        assert_eq!(g_cb(2.0, 10.0).unwrap(), 1.0 / 128.0);
    }

    #[test]
    fn boundary_at_cap_is_a_probability() {
        let v = g_cb(1.0, 7.0).unwrap();
        assert!((0.0..=1.0).contains(&v));
        assert!(v <= g_cb_case1(1.0));
    }

    #[test]
    fn domain_errors() {
        assert!(g_cb(0.9, 2.0).is_err());
        assert!(g_cb(2.0, 0.5).is_err());
        assert!(g_cb(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn rank_one_case3_vanishes() {
        // rho = 1 makes the ratio tail identically zero.
        assert_eq!(g_cb(1.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn grid_shape() {
        let g = rho_grid();
        assert_eq!(g.len(), RHO_GRID_POINTS);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), RHO_CAP);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn closed_form_bounds() {
        assert!((vanilla_bound(2.0, 1) - (2.0 / PI).sqrt() / 2.0).abs() < 1e-15);
        assert!((dixon_bound(2.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(vanilla_bound(0.1, 3), 1.0);
    }
}
