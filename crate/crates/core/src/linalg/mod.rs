//! Exact dyadic and floating-point matrix primitives.

mod dyadic;
mod real;

pub use dyadic::{dyadic_matmul, Dyadic, DyadicMatrix};
pub use real::{ar1_covariance, dct_matrix, RealMatrix};

/// Correlation coefficient used for every figure of merit unless overridden.
pub const DEFAULT_RHO: f64 = 0.95;
