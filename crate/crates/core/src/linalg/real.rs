use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense double-precision matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix(DMatrix<f64>);

impl RealMatrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        RealMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::mismatch(rows * cols, data.len()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(RealMatrix(DMatrix::from_row_slice(rows, cols, data)))
    }

    pub fn identity(n: usize) -> Self {
        RealMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        RealMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn transpose(&self) -> Self {
        RealMatrix(self.0.transpose())
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::mismatch(self.cols(), rhs.rows()));
        }
        Ok(RealMatrix(&self.0 * &rhs.0))
    }

    pub fn sub(&self, rhs: &RealMatrix) -> Result<Self> {
        if self.0.shape() != rhs.0.shape() {
            return Err(Error::mismatch(
                format!("{:?}", self.0.shape()),
                format!("{:?}", rhs.0.shape()),
            ));
        }
        Ok(RealMatrix(&self.0 - &rhs.0))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn try_inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::mismatch(
                "square matrix",
                format!("{}x{}", self.rows(), self.cols()),
            ));
        }
        self.0
            .clone()
            .try_inverse()
            .map(RealMatrix)
            .ok_or(Error::Singular)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &RealMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_inner(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Orthonormal DCT-II matrix of order `n`.
pub fn dct_matrix(n: usize) -> Result<RealMatrix> {
    if n < 2 {
        return Err(Error::InvalidSize {
            size: n,
            reason: "DCT size must be at least 2",
        });
    }
    let nf = n as f64;
    Ok(RealMatrix::from_fn(n, n, |k, j| {
        let beta = if k == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
        (2.0 / nf).sqrt() * beta * (PI * k as f64 * (2 * j + 1) as f64 / (2.0 * nf)).cos()
    }))
}

/// Covariance of a unit-variance first-order Markov process: `R[i][j] = ρ^|i−j|`.
pub fn ar1_covariance(n: usize, rho: f64) -> Result<RealMatrix> {
    if rho.is_nan() || rho.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "correlation {rho} must satisfy |rho| < 1"
        )));
    }
    Ok(RealMatrix::from_fn(n, n, |i, j| {
        rho.powi(i.abs_diff(j) as i32)
    }))
}
