//! Figures of merit for an approximate transform against the exact DCT
//! under a first-order Markov source.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fast::CostProfile;
use crate::kernel::TransformKernel;
use crate::linalg::{ar1_covariance, dct_matrix, RealMatrix};

/// One row of measurements for a transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub label: String,
    /// Total error energy.
    pub epsilon: f64,
    pub mse: f64,
    /// Unified coding gain, dB.
    pub cg: f64,
    /// Transform efficiency, percent.
    pub eta: f64,
    pub adds: Option<u32>,
    pub shifts: Option<u32>,
}

pub const CSV_HEADER: &str = "label,epsilon,mse,cg_db,eta_pct,adds,shifts";

impl MetricsReport {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<u32>| v.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{}",
            self.label,
            self.epsilon,
            self.mse,
            self.cg,
            self.eta,
            opt(self.adds),
            opt(self.shifts)
        )
    }
}

fn check_square(m: &RealMatrix) -> Result<usize> {
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::mismatch(
            "square matrix of order >= 2",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(m.rows())
}

/// `π·‖C − C̃‖²_F`.
pub fn total_error_energy(approx: &RealMatrix) -> Result<f64> {
    let n = check_square(approx)?;
    let diff = dct_matrix(n)?.sub(approx)?;
    Ok(PI * diff.frobenius_norm_sq())
}

/// Total error energy as the sum over rows of `∫₀^π |H_m(ω) − Ĥ_m(ω)|² dω`,
/// where `H_m` is the DTFT of row `m`, by a midpoint rule with `samples`
/// points.
pub fn total_error_energy_spectral(approx: &RealMatrix, samples: usize) -> Result<f64> {
    let n = check_square(approx)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let diff = dct_matrix(n)?.sub(approx)?;
    let h = PI / samples as f64;
    let mut total = 0.0;
    for m in 0..n {
        let row = diff.row(m);
        let mut acc = 0.0;
        for s in 0..samples {
            let w = (s as f64 + 0.5) * h;
            let (mut re, mut im) = (0.0, 0.0);
            for (k, d) in row.iter().enumerate() {
                let (sin, cos) = (w * k as f64).sin_cos();
                re += d * cos;
                im -= d * sin;
            }
            acc += re * re + im * im;
        }
        total += acc * h;
    }
    Ok(total)
}

/// `(1/N)·trace((C − C̃)·R·(C − C̃)ᵀ)`.
pub fn mse_metric(approx: &RealMatrix, rho: f64) -> Result<f64> {
    let n = check_square(approx)?;
    let r = ar1_covariance(n, rho)?;
    let d = dct_matrix(n)?.sub(approx)?;
    Ok(d.matmul(&r)?.matmul(&d.transpose())?.trace() / n as f64)
}

/// `10·log₁₀ ∏ₖ (1/(Aₖ·Bₖ))^(1/N)` with `Aₖ = hₖ·R·hₖᵀ` over the forward rows
/// and `Bₖ` the squared norm of the `k`-th inverse basis vector.
pub fn coding_gain(approx: &RealMatrix, rho: f64) -> Result<f64> {
    let n = check_square(approx)?;
    let r = ar1_covariance(n, rho)?;
    let inv = approx.try_inverse()?;
    let ry = approx.matmul(&r)?.matmul(&approx.transpose())?;
    let mut log_sum = 0.0;
    for k in 0..n {
        let a = ry.get(k, k);
        let b: f64 = (0..n).map(|i| inv.get(i, k).powi(2)).sum();
        log_sum += (a * b).log10();
    }
    Ok(-10.0 * log_sum / n as f64)
}

/// `100·Σ|R_y[k][k]| / Σ|R_y[i][j]|` with `R_y = C̃·R·C̃ᵀ`.
pub fn transform_efficiency(approx: &RealMatrix, rho: f64) -> Result<f64> {
    let n = check_square(approx)?;
    let r = ar1_covariance(n, rho)?;
    let ry = approx.matmul(&r)?.matmul(&approx.transpose())?;
    let diag: f64 = (0..n).map(|k| ry.get(k, k).abs()).sum();
    let total: f64 = ry.as_inner().iter().map(|v| v.abs()).sum();
    Ok(100.0 * diag / total)
}

pub fn evaluate_matrix(
    label: impl Into<String>,
    approx: &RealMatrix,
    rho: f64,
    cost: Option<CostProfile>,
) -> Result<MetricsReport> {
    Ok(MetricsReport {
        label: label.into(),
        epsilon: total_error_energy(approx)?,
        mse: mse_metric(approx, rho)?,
        cg: coding_gain(approx, rho)?,
        eta: transform_efficiency(approx, rho)?,
        adds: cost.map(|c| c.adds),
        shifts: cost.map(|c| c.shifts),
    })
}

pub fn evaluate(kernel: &TransformKernel, rho: f64) -> Result<MetricsReport> {
    evaluate_matrix(kernel.label(), &kernel.approx(), rho, Some(kernel.cost()))
}
