//! The two-weight chi-squared law of `xi^2 + alpha eta^2` for independent
//! standard normals `xi`, `eta`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::gamma::{chi2_1_cdf, chi2_1_pdf};
use super::normal::{erf, std_normal_pdf};
use super::quad::{integrate_with, QuadConfig, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Distribution of `xi^2 + alpha eta^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedChiSq1Alpha {
    alpha: f64,
}

impl WeightedChiSq1Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        wchi2_cdf(self.alpha, t)
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        wchi2_pdf(self.alpha, t)
    }
}

fn check(alpha: f64, t: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    if t.is_nan() {
        return Err(Error::Domain("t is NaN".into()));
    }
    Ok(())
}

/// `P(xi^2 + alpha eta^2 <= t)`.
///
/// For `alpha > 0` this is `E_eta[chi^2_1(t - alpha eta^2)]`, integrated over
/// `eta = sqrt(t/alpha) sin(psi)` so both ends of the support are smooth.
pub fn wchi2_cdf(alpha: f64, t: f64) -> Result<f64> {
    check(alpha, t)?;
    if t < 0.0 {
        return Err(Error::Domain(format!("wchi2_cdf needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(chi2_1_cdf(t));
    }
    let r = (t / alpha).sqrt();
    let half_t = (0.5 * t).sqrt();
    let integrand = |psi: f64| {
        let (s, c) = psi.sin_cos();
        std_normal_pdf(r * s) * erf(half_t * c) * c
    };
    let cfg = QuadConfig {
        abs_tol: DEFAULT_TOL * 1e-3 / (2.0 * r).max(1.0),
        ..QuadConfig::default()
    };
    let v = integrate_with(integrand, 0.0, FRAC_PI_2, &cfg)?.value;
    Ok((2.0 * r * v).clamp(0.0, 1.0))
}

/// Density of `xi^2 + alpha eta^2`.
///
/// For `alpha > 0` the convolution `int_0^t f1(s) f1((t-s)/alpha)/alpha ds`
/// becomes, under `s = t sin^2(phi)`,
/// `1/(pi sqrt(alpha)) int_0^{pi/2} exp(-t sin^2(phi)/2 - t cos^2(phi)/(2 alpha)) dphi`,
/// which removes both inverse-square-root endpoint singularities.
pub fn wchi2_pdf(alpha: f64, t: f64) -> Result<f64> {
    check(alpha, t)?;
    if t <= 0.0 {
        return Err(Error::Domain(format!("wchi2_pdf needs t > 0, got {t}")));
    }
    wchi2_pdf_unchecked(alpha, t, DEFAULT_TOL * 1e-3)
}

/// Same as [`wchi2_pdf`] but total at `t = 0` (returns the limit) and with a
/// caller-chosen absolute tolerance. Used inside outer integrals.
pub(crate) fn wchi2_pdf_unchecked(alpha: f64, t: f64, tol: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(chi2_1_pdf(t));
    }
    let norm = 1.0 / (PI * alpha.sqrt());
    if t <= 0.0 {
        return Ok(0.5 / alpha.sqrt());
    }
    let a = 0.5 * t;
    let b = 0.5 * t / alpha;
    let integrand = |phi: f64| {
        let s = phi.sin();
        let s2 = s * s;
        (-(a * s2) - b * (1.0 - s2)).exp()
    };
    let cfg = QuadConfig {
        abs_tol: tol / norm,
        ..QuadConfig::default()
    };
    Ok(norm * integrate_with(integrand, 0.0, FRAC_PI_2, &cfg)?.value)
}
