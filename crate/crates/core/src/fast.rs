//! Sparse factorization `T(a) = P·K(a)·A₂·A₁` and its operation count.
//!
//! `A₁` is an 8-point butterfly (8 additions), `A₂` a 4-point butterfly on
//! the even half (4 additions), `K(a)` a block-diagonal core whose cost
//! depends on how many parameters vanish, and `P` a row permutation.

use serde::{Deserialize, Serialize};

use crate::class::ParamVector;
use crate::linalg::{Dyadic, DyadicMatrix};

/// Scalars the fast algorithm runs on: it only ever adds, subtracts,
/// negates, halves and doubles.
pub trait ShiftAdd: Copy {
    fn zero() -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn neg(self) -> Self;
    fn half(self) -> Self;
    fn double(self) -> Self;
}

impl ShiftAdd for Dyadic {
    fn zero() -> Self {
        Dyadic::ZERO
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn neg(self) -> Self {
        -self
    }
    fn half(self) -> Self {
        Dyadic::half(self)
    }
    fn double(self) -> Self {
        Dyadic::double(self)
    }
}

impl ShiftAdd for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn neg(self) -> Self {
        -self
    }
    fn half(self) -> Self {
        self * 0.5
    }
    fn double(self) -> Self {
        self * 2.0
    }
}

/// Additive and bit-shift cost of one transform application.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostProfile {
    pub adds: u32,
    pub shifts: u32,
}

/// Operations actually executed by an instrumented run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub adds: u32,
    pub shifts: u32,
}

/// Closed-form cost: 22 additions minus one per vanishing parameter, one
/// shift per parameter of magnitude 1/2 or 2.
pub fn complexity(a: &ParamVector) -> CostProfile {
    let h = a.halves();
    let zeros = h.iter().filter(|&&v| v == 0).count() as u32;
    let shifts = h.iter().filter(|&&v| v.abs() == 1 || v.abs() == 4).count() as u32;
    CostProfile {
        adds: 22 - zeros,
        shifts,
    }
}

/// Elements moved by `P`, in cycle order: row `j` of `K·A₂·A₁` lands at
/// row `P_CYCLE[(pos(j) + 1) % 5]`.
pub const P_CYCLE: [usize; 5] = [1, 4, 3, 2, 6];

fn perm_from_cycle(cycle: &[usize]) -> [usize; 8] {
    let mut perm: [usize; 8] = std::array::from_fn(|i| i);
    for (k, &src) in cycle.iter().enumerate() {
        perm[src] = cycle[(k + 1) % cycle.len()];
    }
    perm
}

/// `perm[j]` is the output row receiving row `j` of `K(a)·A₂·A₁`.
pub fn permutation_p() -> [usize; 8] {
    perm_from_cycle(&P_CYCLE)
}

/// The opposite reading of the cycle notation; kept for the test that
/// pins the convention down.
pub fn permutation_p_reversed() -> [usize; 8] {
    let mut rev = P_CYCLE;
    rev.reverse();
    perm_from_cycle(&rev)
}

/// A row (or column) of `K(a)`: up to three `(coefficient in half-units,
/// input index)` pairs; a zero coefficient marks an unused slot.
type Row = [(i8, usize); 3];

type CoreRows = [Row; 8];

/// Sparse rows of `K(a)` in half-units.
fn core_rows(a: &ParamVector) -> CoreRows {
    let [a1, a2, a3, a4, a5, a6, a7, a8] = a.halves();
    [
        [(2, 0), (2, 1), (0, 0)],
        [(2, 0), (-2, 1), (0, 0)],
        [(-2, 2), (0, 0), (0, 0)],
        [(2, 3), (0, 0), (0, 0)],
        [(-a4, 4), (-2, 5), (a3, 7)],
        [(a6, 4), (-2, 6), (a5, 7)],
        [(a2, 5), (a1, 6), (2, 7)],
        [(-2, 4), (a8, 5), (-a7, 6)],
    ]
}

fn transpose_rows(rows: &CoreRows) -> CoreRows {
    let mut out: CoreRows = [[(0, 0); 3]; 8];
    for (r, row) in rows.iter().enumerate() {
        for &(h, input) in row.iter().filter(|t| t.0 != 0) {
            let slot = out[input]
                .iter_mut()
                .find(|s| s.0 == 0)
                .expect("at most three terms per column");
            *slot = (h, r);
        }
    }
    out
}

/// `|h|/2 · v`, counting a shift unless `|h| = 2`.
fn magnitude<T: ShiftAdd>(h: i8, v: T, ops: &mut OpCount) -> T {
    match h.unsigned_abs() {
        2 => v,
        1 => {
            ops.shifts += 1;
            v.half()
        }
        4 => {
            ops.shifts += 1;
            v.double()
        }
        _ => unreachable!("parameter outside the alphabet"),
    }
}

fn eval_row<T: ShiftAdd>(row: &Row, w: &[T; 8], ops: &mut OpCount) -> T {
    let mut acc: Option<T> = None;
    for &(h, input) in row.iter().filter(|t| t.0 != 0) {
        let v = magnitude(h, w[input], ops);
        acc = Some(match acc {
            None if h < 0 => v.neg(),
            None => v,
            Some(a) => {
                ops.adds += 1;
                if h < 0 {
                    a.sub(v)
                } else {
                    a.add(v)
                }
            }
        });
    }
    acc.unwrap_or_else(T::zero)
}

fn butterfly_a1<T: ShiftAdd>(x: &[T; 8], ops: &mut OpCount) -> [T; 8] {
    ops.adds += 8;
    std::array::from_fn(|i| {
        if i < 4 {
            x[i].add(x[7 - i])
        } else {
            x[7 - i].sub(x[i])
        }
    })
}

fn butterfly_a2<T: ShiftAdd>(w: &[T; 8], ops: &mut OpCount) -> [T; 8] {
    ops.adds += 4;
    let mut z = *w;
    z[0] = w[0].add(w[3]);
    z[1] = w[1].add(w[2]);
    z[2] = w[1].sub(w[2]);
    z[3] = w[0].sub(w[3]);
    z
}

/// `T(a)·x` through the factorization, counting every executed operation.
pub fn apply_fast_counted<T: ShiftAdd>(a: &ParamVector, x: &[T; 8], ops: &mut OpCount) -> [T; 8] {
    let w = butterfly_a2(&butterfly_a1(x, ops), ops);
    let rows = core_rows(a);
    let perm = permutation_p();
    let mut y = [T::zero(); 8];
    for (j, terms) in rows.iter().enumerate() {
        y[perm[j]] = eval_row(terms, &w, ops);
    }
    y
}

/// `T(a)·x` using only additions, negations and one-bit shifts.
pub fn apply_fast<T: ShiftAdd>(a: &ParamVector, x: &[T; 8]) -> [T; 8] {
    apply_fast_counted(a, x, &mut OpCount::default())
}

/// `T(a)ᵀ·y`: the same stages in reverse order, each transposed.
/// `A₁` and `A₂` are symmetric.
pub fn apply_fast_transpose<T: ShiftAdd>(a: &ParamVector, y: &[T; 8]) -> [T; 8] {
    let ops = &mut OpCount::default();
    let perm = permutation_p();
    let k_in: [T; 8] = std::array::from_fn(|j| y[perm[j]]);
    let cols = transpose_rows(&core_rows(a));
    let w: [T; 8] = std::array::from_fn(|i| eval_row(&cols[i], &k_in, ops));
    butterfly_a1(&butterfly_a2(&w, ops), ops)
}

/// The four factors of `T(a)` as exact matrices.
#[derive(Clone, Debug)]
pub struct FactoredTransform {
    pub a: ParamVector,
    pub a1: DyadicMatrix,
    pub a2: DyadicMatrix,
    pub core: DyadicMatrix,
    pub permutation: DyadicMatrix,
}

impl FactoredTransform {
    pub fn new(a: &ParamVector) -> Self {
        Self::with_permutation(a, &permutation_p())
    }

    pub fn with_permutation(a: &ParamVector, perm: &[usize; 8]) -> Self {
        let a1 = DyadicMatrix::from_fn(8, 8, |i, j| {
            let one = Dyadic::ONE;
            match (i < 4, j < 4) {
                (true, true) if i == j => one,
                (true, false) if j == 7 - i => one,
                (false, true) if j == 7 - i => one,
                (false, false) if i == j => -one,
                _ => Dyadic::ZERO,
            }
        });
        let a2 = DyadicMatrix::from_fn(8, 8, |i, j| {
            let one = Dyadic::ONE;
            if i >= 4 || j >= 4 {
                return if i == j { one } else { Dyadic::ZERO };
            }
            match (i < 2, j < 2) {
                (true, true) if i == j => one,
                (true, false) if j == 3 - i => one,
                (false, true) if j == 3 - i => one,
                (false, false) if i == j => -one,
                _ => Dyadic::ZERO,
            }
        });
        let rows = core_rows(a);
        let core = DyadicMatrix::from_fn(8, 8, |i, j| {
            rows[i]
                .iter()
                .find(|t| t.0 != 0 && t.1 == j)
                .map_or(Dyadic::ZERO, |t| Dyadic::new(t.0 as i64, 1))
        });
        let permutation = DyadicMatrix::from_fn(8, 8, |i, j| {
            if perm[j] == i {
                Dyadic::ONE
            } else {
                Dyadic::ZERO
            }
        });
        FactoredTransform {
            a: *a,
            a1,
            a2,
            core,
            permutation,
        }
    }

    /// `P·K(a)·A₂·A₁`, exactly.
    pub fn compose(&self) -> DyadicMatrix {
        let m = self.a2.matmul(&self.a1).expect("8x8");
        let m = self.core.matmul(&m).expect("8x8");
        self.permutation.matmul(&m).expect("8x8")
    }
}
