//! Doubling an N-point kernel to 2N points.
//!
//! The input is folded by a butterfly (`uᵢ = xᵢ + x₂ₙ₋₁₋ᵢ`,
//! `vᵢ = xᵢ − x₂ₙ₋₁₋ᵢ`), both halves go through the base transform, and
//! the results are interleaved: row `2k` is base row `k` on `u`, row `2k+1`
//! is base row `k` on `v`. In matrix form row `2k` is `[t_k | rev t_k]` and
//! row `2k+1` is `[t_k | −rev t_k]`. Normalization is folded into the
//! diagonal scale, recomputed from the doubled matrix.

use crate::error::{Error, Result};
use crate::fast::CostProfile;
use crate::kernel::{Structure, TransformKernel};
use crate::linalg::{Dyadic, DyadicMatrix};

/// A doubled kernel with its provenance.
#[derive(Clone, Debug)]
pub struct ScaledKernel {
    pub base: TransformKernel,
    pub result: TransformKernel,
    pub generation: u32,
}

pub fn doubled_low_matrix(base: &DyadicMatrix) -> DyadicMatrix {
    let n = base.rows();
    DyadicMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let k = i / 2;
        if j < n {
            base.get(k, j)
        } else {
            let v = base.get(k, 2 * n - 1 - j);
            if i % 2 == 0 {
                v
            } else {
                -v
            }
        }
    })
}

/// One doubling. Costs become `2·adds + 2N` and `2·shifts`.
pub fn jam_double(base: &TransformKernel) -> Result<TransformKernel> {
    let n = base.size();
    let low = doubled_low_matrix(base.low_matrix());
    let cost = CostProfile {
        adds: 2 * base.adds() + 2 * n as u32,
        shifts: 2 * base.shifts(),
    };
    let structure = Structure::Jam {
        inner: Box::new(base.structure().clone()),
        inner_low: base.low_matrix().clone(),
    };
    let label = format!("{}@{}", base_label(base.label()), 2 * n);
    TransformKernel::new(label, low, cost, structure)
}

fn base_label(label: &str) -> &str {
    label.split('@').next().unwrap_or(label)
}

/// Scales an 8-point kernel to 16 or 32 points.
pub fn jam_scale_to(base: &TransformKernel, target: usize) -> Result<TransformKernel> {
    if base.size() != 8 {
        return Err(Error::InvalidSize {
            size: base.size(),
            reason: "scaling starts from an 8-point kernel",
        });
    }
    let doublings = match target {
        8 => return Ok(base.clone()),
        16 => 1,
        32 => 2,
        _ => {
            return Err(Error::InvalidSize {
                size: target,
                reason: "supported sizes are 8, 16 and 32",
            })
        }
    };
    Ok(scale_with_history(base, doublings)?.result)
}

pub fn scale_with_history(base: &TransformKernel, doublings: u32) -> Result<ScaledKernel> {
    let mut result = base.clone();
    for _ in 0..doublings {
        result = jam_double(&result)?;
    }
    Ok(ScaledKernel {
        base: base.clone(),
        result,
        generation: doublings,
    })
}

/// Diagonal of `T₂ₙ·T₂ₙᵀ` predicted from the base: each doubled row has
/// twice the energy of its base row.
pub fn predicted_row_norms(base: &TransformKernel) -> Vec<Dyadic> {
    base.row_norms()
        .iter()
        .flat_map(|&n| [n.double(), n.double()])
        .collect()
}
