//! Randomized spectral-norm upper bounds from a handful of matrix-vector
//! products, with calibration of the inflation factor and a Monte Carlo
//! benchmark harness.

pub mod bench;
pub mod calibration;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod operator;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use estimators::{
    base_statistic, counterbalance, dixon, estimate, power_ratio, vanilla, EstimatorKind,
    EstimatorReport,
};
pub use operator::{dense_svd, make_dense_operator, GroundTruth, LinearOperator};
pub use rng::RandomSource;
