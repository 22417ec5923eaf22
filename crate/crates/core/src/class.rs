//! The parametric low-complexity matrix family `T(a)` and its orthogonality
//! conditions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::fast;
use crate::kernel::{Structure, TransformKernel};
use crate::linalg::{Dyadic, DyadicMatrix, RealMatrix};

/// Admissible parameter values in half-units, ascending:
/// `{-2, -1, -1/2, 0, 1/2, 1, 2}`.
pub const ALPHABET_HALVES: [i8; 7] = [-4, -2, -1, 0, 1, 2, 4];

/// Size of the unconstrained search space, `7^8`.
pub const SPACE_SIZE: u64 = 5_764_801;

/// Eight parameters, each drawn from `{0, ±1/2, ±1, ±2}`, stored in
/// half-units so that every value is an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamVector([i8; 8]);

impl ParamVector {
    pub const ZERO: ParamVector = ParamVector([0; 8]);

    pub fn new(values: [f64; 8]) -> Result<Self> {
        let mut halves = [0i8; 8];
        for (h, &v) in halves.iter_mut().zip(values.iter()) {
            let doubled = v * 2.0;
            if doubled.fract() != 0.0
                || !ALPHABET_HALVES.contains(&(doubled as i8))
                || doubled.abs() > 4.0
            {
                return Err(Error::InvalidParameter(format!(
                    "{v} is not in {{0, ±1/2, ±1, ±2}}"
                )));
            }
            *h = doubled as i8;
        }
        Ok(ParamVector(halves))
    }

    pub fn from_halves(halves: [i8; 8]) -> Result<Self> {
        if let Some(bad) = halves.iter().find(|h| !ALPHABET_HALVES.contains(h)) {
            return Err(Error::InvalidParameter(format!(
                "{} is not in {{0, ±1/2, ±1, ±2}}",
                *bad as f64 / 2.0
            )));
        }
        Ok(ParamVector(halves))
    }

    /// Decodes a base-7 index in `0..7^8` (first parameter most significant).
    pub fn from_index(mut index: u64) -> Self {
        let mut halves = [0i8; 8];
        for h in halves.iter_mut().rev() {
            *h = ALPHABET_HALVES[(index % 7) as usize];
            index /= 7;
        }
        ParamVector(halves)
    }

    pub fn index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, h| {
            acc * 7 + ALPHABET_HALVES.iter().position(|a| a == h).unwrap() as u64
        })
    }

    pub fn halves(&self) -> [i8; 8] {
        self.0
    }

    /// The `i`-th parameter (0-based) as an exact value.
    pub fn get(&self, i: usize) -> Dyadic {
        Dyadic::new(self.0[i] as i64, 1)
    }

    pub fn to_f64(&self) -> [f64; 8] {
        self.0.map(|h| h as f64 / 2.0)
    }
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_f64().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl FromStr for ParamVector {
    type Err = Error;

    /// Accepts comma- or whitespace-separated values, optionally bracketed,
    /// with fractions written as `0.5` or `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let values: Vec<f64> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(parse_value)
            .collect::<Result<_>>()?;
        let values: [f64; 8] = values.try_into().map_err(|v: Vec<f64>| {
            Error::InvalidParameter(format!("expected 8 parameters, got {}", v.len()))
        })?;
        ParamVector::new(values)
    }
}

fn parse_value(tok: &str) -> Result<f64> {
    let bad = || Error::InvalidParameter(format!("cannot parse parameter '{tok}'"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.parse().map_err(|_| bad())?;
            let d: f64 = d.parse().map_err(|_| bad())?;
            Ok(n / d)
        }
        None => tok.parse().map_err(|_| bad()),
    }
}

impl Serialize for ParamVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_f64().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 8]>::deserialize(d)?;
        ParamVector::new(v).map_err(serde::de::Error::custom)
    }
}

/// Builds `T(a)` exactly.
pub fn build_t(a: &ParamVector) -> DyadicMatrix {
    let [a1, a2, a3, a4, a5, a6, a7, a8] = a.halves().map(i64::from);
    // Everything in half-units: 2 stands for 1.
    let rows: [[i64; 8]; 8] = [
        [2, 2, 2, 2, 2, 2, 2, 2],
        [2, a1, a2, 0, 0, -a2, -a1, -2],
        [2, 0, 0, -2, -2, 0, 0, 2],
        [a3, 0, -2, -a4, a4, 2, 0, -a3],
        [2, -2, -2, 2, 2, -2, -2, 2],
        [a5, -2, 0, a6, -a6, 0, 2, -a5],
        [0, -2, 2, 0, 0, 2, -2, 0],
        [0, -a7, a8, -2, 2, -a8, a7, 0],
    ];
    DyadicMatrix::from_rows(&rows, 1).expect("8x8 layout")
}

/// The ten entries `τ₁…τ₁₀` of `T(a)·T(a)ᵀ` that depend on `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TauProfile {
    pub tau: [Dyadic; 10],
}

impl TauProfile {
    /// `τ_k` with 1-based `k`.
    pub fn get(&self, k: usize) -> Dyadic {
        self.tau[k - 1]
    }

    /// The six entries that must vanish for orthogonality.
    pub fn off_diagonal(&self) -> [Dyadic; 6] {
        [2, 3, 4, 6, 7, 9].map(|k| self.get(k))
    }

    /// The four diagonal entries, in row order 1, 3, 5, 7.
    pub fn diagonal(&self) -> [Dyadic; 4] {
        [1, 5, 8, 10].map(|k| self.get(k))
    }
}

pub fn tau_profile(a: &ParamVector) -> TauProfile {
    let p: Vec<Dyadic> = (0..8).map(|i| a.get(i)).collect();
    let two = Dyadic::from_int(2);
    let sq = |x: Dyadic| x * x;
    let tau = [
        two * (sq(p[0]) + sq(p[1])) + two,
        two * (p[2] - p[1]),
        two * (p[4] - p[0]),
        two * (p[1] * p[7] - p[0] * p[6]),
        two * (sq(p[2]) + sq(p[3])) + two,
        two * (p[2] * p[4] - p[3] * p[5]),
        two * (p[3] - p[7]),
        two * (sq(p[4]) + sq(p[5])) + two,
        two * (p[6] - p[5]),
        two * (sq(p[6]) + sq(p[7])) + two,
    ];
    TauProfile { tau }
}

/// Exact test of the six vanishing conditions. The four diagonal `τ` are
/// at least 2 for every admissible `a`, so their nonzero conditions never bind.
pub fn is_orthogonal(a: &ParamVector) -> bool {
    tau_profile(a).off_diagonal().iter().all(|t| t.is_zero())
}

/// Equivalent closed form of the orthogonality conditions:
/// `a3=a2, a5=a1, a7=a6, a8=a4, a1·a2=a4·a6, a1·a6=a2·a4`.
pub fn satisfies_reduced_constraints(a: &ParamVector) -> bool {
    let h = a.halves().map(i32::from);
    let [a1, a2, a3, a4, a5, a6, a7, a8] = h;
    a3 == a2 && a5 == a1 && a7 == a6 && a8 == a4 && a1 * a2 == a4 * a6 && a1 * a6 == a2 * a4
}

fn require_orthogonal(a: &ParamVector) -> Result<TauProfile> {
    let tau = tau_profile(a);
    if tau.off_diagonal().iter().any(|t| !t.is_zero()) {
        return Err(Error::NotOrthogonal(format!("T(a) for a = {a}")));
    }
    Ok(tau)
}

/// Squared row norms of `T(a)`, i.e. the diagonal of `T(a)·T(a)ᵀ`.
pub fn row_norms(a: &ParamVector) -> [Dyadic; 8] {
    let [t1, t5, t8, t10] = tau_profile(a).diagonal();
    let (four, eight) = (Dyadic::from_int(4), Dyadic::from_int(8));
    [eight, t1, four, t5, eight, t8, four, t10]
}

/// Diagonal normalization `S(a)` that makes `S(a)·T(a)` orthonormal.
pub fn scaling_matrix(a: &ParamVector) -> Result<RealMatrix> {
    require_orthogonal(a)?;
    let s: Vec<f64> = row_norms(a)
        .iter()
        .map(|d| 1.0 / d.to_f64().sqrt())
        .collect();
    Ok(RealMatrix::diag(&s))
}

/// Orthonormal approximation `S(a)·T(a)` packaged with its cost.
pub fn orthonormalize(a: &ParamVector) -> Result<TransformKernel> {
    require_orthogonal(a)?;
    let label = catalog::label_for(a).map_or_else(|| format!("a={a}"), str::to_string);
    TransformKernel::new(
        label,
        build_t(a),
        fast::complexity(a),
        Structure::Parametric(*a),
    )
}
