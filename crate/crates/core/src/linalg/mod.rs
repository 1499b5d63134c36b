//! Dense linear algebra kernels used for ground truth and operator construction.

mod dense;
mod eigh;
mod expm;
mod lu;
mod qr;
mod svd;

pub use dense::{dot, norm2, DenseMatrix};
pub use eigh::symmetric_eigen;
pub use expm::expm;
pub use lu::solve;
pub use qr::householder_qr;
pub use svd::{jacobi_svd, Svd, DENSE_SVD_CAP};
