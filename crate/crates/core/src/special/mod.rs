//! Probability kernels: normal and chi-squared distribution functions, the
//! two-weight chi-squared law, and adaptive quadrature.

mod gamma;
mod normal;
mod quad;
mod wchi2;

pub use gamma::{chi2_1_cdf, chi2_1_pdf, chi2_cdf, ln_gamma_half};
pub use normal::{erf, erfc, std_normal_cdf, std_normal_pdf};
pub use quad::{integrate, integrate_with, Integral, QuadConfig, DEFAULT_TOL};
pub use wchi2::{wchi2_cdf, wchi2_pdf, WeightedChiSq1Alpha};
pub(crate) use wchi2::wchi2_pdf_unchecked;
