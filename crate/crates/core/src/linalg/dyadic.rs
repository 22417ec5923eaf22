//! Exact arithmetic on dyadic rationals `k·2⁻ᵉ`.
//!
//! Every value that appears in the low-complexity matrices, their products
//! and the fast algorithm's intermediate results is dyadic, so all of it is
//! carried exactly in integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// A dyadic rational `num · 2^-exp`, kept in lowest terms
/// (`num` odd unless `exp == 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i64, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    /// Exact conversion from an `f64` if the value is dyadic with a
    /// representable numerator.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let mut exp = 0u32;
        let mut v = x;
        while v.fract() != 0.0 {
            if exp >= 62 {
                return None;
            }
            v *= 2.0;
            exp += 1;
        }
        if v.abs() >= 9.0e18 {
            return None;
        }
        Some(Dyadic::new(v as i64, exp))
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Multiplication by two.
    pub fn double(self) -> Self {
        if self.exp > 0 {
            Dyadic {
                num: self.num,
                exp: self.exp - 1,
            }
        } else {
            Dyadic {
                num: self.num << 1,
                exp: 0,
            }
        }
    }

    /// Multiplication by one half.
    pub fn half(self) -> Self {
        Dyadic::new(self.num, self.exp + 1)
    }

    /// Numerator at a fixed (not smaller) exponent.
    pub fn scaled_to(self, exp: u32) -> i64 {
        debug_assert!(exp >= self.exp);
        self.num << (exp - self.exp)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.exp) as f64
    }
}

fn align(a: Dyadic, b: Dyadic) -> (i64, i64, u32) {
    let e = a.exp.max(b.exp);
    (a.scaled_to(e), b.scaled_to(e), e)
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (x, y, e) = align(self, rhs);
        Dyadic::new(x + y, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (x, y, e) = align(self, rhs);
        Dyadic::new(x - y, e)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(self.num * rhs.num, self.exp + rhs.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (x, y, _) = align(*self, *other);
        x.cmp(&y)
    }
}

/// Rational notation, e.g. `6`, `-1/2`, `9/2`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

/// Matrix whose cell `(i, j)` represents `entries[i·cols + j] · 2^-scale_exp`.
///
/// `scale_exp` is always minimal, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicMatrix {
    rows: usize,
    cols: usize,
    scale_exp: u32,
    entries: Vec<i64>,
}

impl DyadicMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>, scale_exp: u32) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::mismatch(rows * cols, entries.len()));
        }
        let mut m = DyadicMatrix {
            rows,
            cols,
            scale_exp,
            entries,
        };
        m.minimize();
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], scale_exp: u32) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::mismatch(cols, r.len()));
            }
            entries.extend_from_slice(r);
        }
        DyadicMatrix::new(rows.len(), cols, entries, scale_exp)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Dyadic) -> Self {
        let cells: Vec<Dyadic> = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        let exp = cells.iter().map(|d| d.exp).max().unwrap_or(0);
        let entries = cells.iter().map(|d| d.scaled_to(exp)).collect();
        let mut m = DyadicMatrix {
            rows,
            cols,
            scale_exp: exp,
            entries,
        };
        m.minimize();
        m
    }

    pub fn identity(n: usize) -> Self {
        DyadicMatrix::from_fn(n, n, |i, j| if i == j { Dyadic::ONE } else { Dyadic::ZERO })
    }

    fn minimize(&mut self) {
        while self.scale_exp > 0 && self.entries.iter().all(|e| e % 2 == 0) {
            self.entries.iter_mut().for_each(|e| *e /= 2);
            self.scale_exp -= 1;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Raw integer at the matrix's own exponent.
    pub fn raw(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    /// Integer entries re-expressed at exponent `exp >= scale_exp`.
    pub fn entries_at(&self, exp: u32) -> Option<Vec<i64>> {
        if exp < self.scale_exp {
            return None;
        }
        let shift = exp - self.scale_exp;
        Some(self.entries.iter().map(|e| e << shift).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> Dyadic {
        Dyadic::new(self.raw(i, j), self.scale_exp)
    }

    pub fn row(&self, i: usize) -> Vec<Dyadic> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.raw(i, j));
            }
        }
        DyadicMatrix {
            rows: self.cols,
            cols: self.rows,
            scale_exp: self.scale_exp,
            entries,
        }
    }

    pub fn matmul(&self, rhs: &DyadicMatrix) -> Result<Self> {
        dyadic_matmul(self, rhs)
    }

    pub fn matvec(&self, x: &[Dyadic]) -> Result<Vec<Dyadic>> {
        if x.len() != self.cols {
            return Err(Error::mismatch(self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                x.iter()
                    .enumerate()
                    .fold(Dyadic::ZERO, |acc, (j, &v)| acc + self.get(i, j) * v)
            })
            .collect())
    }

    /// Row permutation: output row `perm[i]` is input row `i`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let mut entries = vec![0; self.entries.len()];
        for (i, &dst) in perm.iter().enumerate() {
            entries[dst * self.cols..(dst + 1) * self.cols]
                .copy_from_slice(&self.entries[i * self.cols..(i + 1) * self.cols]);
        }
        DyadicMatrix {
            entries,
            ..self.clone()
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.raw(i, j) == 0))
    }

    pub fn diagonal(&self) -> Vec<Dyadic> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// `T·Tᵀ`, the Gram matrix of the rows.
    pub fn gram(&self) -> Self {
        self.matmul(&self.transpose())
            .expect("row gram is always conformable")
    }

    pub fn to_real(&self) -> RealMatrix {
        let denom = (1u64 << self.scale_exp) as f64;
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self.raw(i, j) as f64 / denom)
    }
}

/// Exact product. The result's exponent is `A.scale_exp + B.scale_exp`
/// before re-minimization.
pub fn dyadic_matmul(a: &DyadicMatrix, b: &DyadicMatrix) -> Result<DyadicMatrix> {
    if a.cols != b.rows {
        return Err(Error::mismatch(
            format!("{} rows on the right operand", a.cols),
            b.rows,
        ));
    }
    let mut entries = vec![0i64; a.rows * b.cols];
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.raw(i, k);
            if aik == 0 {
                continue;
            }
            for j in 0..b.cols {
                entries[i * b.cols + j] += aik * b.raw(k, j);
            }
        }
    }
    DyadicMatrix::new(a.rows, b.cols, entries, a.scale_exp + b.scale_exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dyadic_normalizes() {
        let d = Dyadic::new(4, 3);
        assert_eq!(d, Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 5), Dyadic::ZERO);
        assert_eq!(Dyadic::new(6, 0).numerator(), 6);
    }

    #[test]
    fn dyadic_shifts_are_exact() {
        let x = Dyadic::new(3, 0);
        assert_eq!(x.half(), Dyadic::new(3, 1));
        assert_eq!(x.half().double(), x);
        assert_eq!(x.double(), Dyadic::from_int(6));
        assert_eq!(Dyadic::from_f64(-0.5), Some(Dyadic::new(-1, 1)));
        assert_eq!(Dyadic::from_f64(1e-30), None);
        assert_eq!(Dyadic::from_f64(f64::NAN), None);
    }

    #[test]
    fn dyadic_display() {
        assert_eq!(Dyadic::new(9, 1).to_string(), "9/2");
        assert_eq!(Dyadic::from_int(-8).to_string(), "-8");
    }

    #[test]
    fn identity_times_x() {
        let x = DyadicMatrix::from_rows(
            &[[1, 2, 3, 4], [0, -1, 5, 7], [3, 3, 3, 3], [9, 0, 0, 1]],
            1,
        )
        .unwrap();
        assert_eq!(DyadicMatrix::identity(4).matmul(&x).unwrap(), x);
    }

    #[test]
    fn minimal_exponent() {
        let m = DyadicMatrix::from_rows(&[[2, 4], [-6, 0]], 1).unwrap();
        assert_eq!(m.scale_exp(), 0);
        assert_eq!(m.raw(1, 0), -3);
        let z = DyadicMatrix::from_rows(&[[0, 0]], 3).unwrap();
        assert_eq!(z.scale_exp(), 0);
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = DyadicMatrix::identity(3);
        let b = DyadicMatrix::identity(4);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch { .. })));
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = DyadicMatrix> {
        (proptest::collection::vec(-8i64..=8, rows * cols), 0u32..3)
            .prop_map(move |(e, s)| DyadicMatrix::new(rows, cols, e, s).unwrap())
    }

    proptest! {
        #[test]
        fn transpose_is_involution(a in small_matrix(3, 5)) {
            prop_assert_eq!(a.transpose().transpose(), a);
        }

        #[test]
        fn product_transpose_rule(a in small_matrix(4, 3), b in small_matrix(3, 5)) {
            let lhs = a.matmul(&b).unwrap().transpose();
            let rhs = b.transpose().matmul(&a.transpose()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn exact_product_agrees_with_float(a in small_matrix(4, 6), b in small_matrix(6, 3)) {
            let exact = a.matmul(&b).unwrap().to_real();
            let float = a.to_real().matmul(&b.to_real()).unwrap();
            prop_assert!(exact.sub(&float).unwrap().frobenius_norm_sq() < 1e-24);
        }

        #[test]
        fn dyadic_ring_ops(x in -1000i64..1000, ex in 0u32..6, y in -1000i64..1000, ey in 0u32..6) {
            let (a, b) = (Dyadic::new(x, ex), Dyadic::new(y, ey));
            prop_assert_eq!((a + b).to_f64(), a.to_f64() + b.to_f64());
            prop_assert_eq!((a - b).to_f64(), a.to_f64() - b.to_f64());
            prop_assert_eq!((a * b).to_f64(), a.to_f64() * b.to_f64());
            prop_assert_eq!(a.partial_cmp(&b), a.to_f64().partial_cmp(&b.to_f64()));
        }
    }
}
