//! Orthonormal approximations `C̃ = S·T`: a dyadic low-complexity matrix,
//! its diagonal normalization and its arithmetic cost.
//!
//! Text format (one record per file, `#` starts a comment):
//!
//! ```text
//! label new-j7
//! size 8
//! adds 22
//! shifts 4
//! entry_exp 1
//! matrix
//! 2 2 2 2 2 2 2 2
//! ...                     (size rows of integers; value = k·2^-entry_exp)
//! scale
//! 1/sqrt(8) 0.35355339059327379
//! ...                     (size rows: exact expression, decimal)
//! ```
//!
//! On parse the scale is recomputed from the matrix and the listed
//! decimals must agree with it.

use std::fmt::Write as _;

use crate::class::ParamVector;
use crate::error::{Error, Result};
use crate::fast::{self, CostProfile};
use crate::linalg::{Dyadic, DyadicMatrix, RealMatrix};

/// How a kernel's low-complexity matrix can be applied quickly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    /// 8-point member of the parametric family.
    Parametric(ParamVector),
    /// Doubling of a half-size kernel (input butterfly, two half-size
    /// transforms, even/odd interleave).
    Jam {
        inner: Box<Structure>,
        inner_low: DyadicMatrix,
    },
    /// No known factorization; applied as a dense matrix.
    Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformKernel {
    label: String,
    low: DyadicMatrix,
    norms: Vec<Dyadic>,
    cost: CostProfile,
    structure: Structure,
}

impl TransformKernel {
    /// Fails unless `low` is square with exactly orthogonal rows.
    pub fn new(
        label: impl Into<String>,
        low: DyadicMatrix,
        cost: CostProfile,
        structure: Structure,
    ) -> Result<Self> {
        if !low.is_square() || low.rows() < 2 {
            return Err(Error::mismatch(
                "square matrix of order >= 2",
                format!("{}x{}", low.rows(), low.cols()),
            ));
        }
        let gram = low.gram();
        if !gram.is_diagonal() {
            return Err(Error::NotOrthogonal(
                "rows are not mutually orthogonal".into(),
            ));
        }
        let norms = gram.diagonal();
        if norms.iter().any(|n| n.is_zero()) {
            return Err(Error::NotOrthogonal("zero row".into()));
        }
        Ok(TransformKernel {
            label: label.into(),
            low,
            norms,
            cost,
            structure,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn size(&self) -> usize {
        self.low.rows()
    }

    pub fn adds(&self) -> u32 {
        self.cost.adds
    }

    pub fn shifts(&self) -> u32 {
        self.cost.shifts
    }

    pub fn cost(&self) -> CostProfile {
        self.cost
    }

    pub fn low_matrix(&self) -> &DyadicMatrix {
        &self.low
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// Diagonal of `T·Tᵀ`.
    pub fn row_norms(&self) -> &[Dyadic] {
        &self.norms
    }

    /// Diagonal of `S = sqrt((T·Tᵀ)⁻¹)`.
    pub fn scale(&self) -> Vec<f64> {
        self.norms.iter().map(|n| 1.0 / n.to_f64().sqrt()).collect()
    }

    pub fn scale_matrix(&self) -> RealMatrix {
        RealMatrix::diag(&self.scale())
    }

    /// Exact text for scale entry `i`, e.g. `1/sqrt(6)`.
    pub fn scale_expr(&self, i: usize) -> String {
        format!("1/sqrt({})", self.norms[i])
    }

    /// `C̃ = S·T`.
    pub fn approx(&self) -> RealMatrix {
        let s = self.scale();
        let t = self.low.to_real();
        RealMatrix::from_fn(self.size(), self.size(), |i, j| s[i] * t.get(i, j))
    }

    /// `T·x` in floating point, through the fastest known structure.
    pub fn apply_low(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.apply_low_in_place(&mut out, &mut vec![0.0; self.scratch_len()]);
        out
    }

    /// `Tᵀ·y` in floating point.
    pub fn apply_low_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        self.apply_low_transpose_in_place(&mut out, &mut vec![0.0; self.scratch_len()]);
        out
    }

    /// Working space needed by the in-place variants.
    pub fn scratch_len(&self) -> usize {
        4 * self.size()
    }

    /// Overwrites `x` with `T·x` without allocating.
    pub fn apply_low_in_place(&self, x: &mut [f64], scratch: &mut [f64]) {
        assert_eq!(x.len(), self.size());
        assert!(scratch.len() >= self.scratch_len());
        apply_structure(&self.structure, &self.low, x, scratch);
    }

    /// Overwrites `y` with `Tᵀ·y` without allocating.
    pub fn apply_low_transpose_in_place(&self, y: &mut [f64], scratch: &mut [f64]) {
        assert_eq!(y.len(), self.size());
        assert!(scratch.len() >= self.scratch_len());
        apply_structure_transpose(&self.structure, &self.low, y, scratch);
    }

    pub fn to_text(&self) -> String {
        let n = self.size();
        let exp = self.low.scale_exp().max(1);
        let entries = self.low.entries_at(exp).expect("exp >= scale_exp");
        let mut out = String::new();
        writeln!(out, "label {}", self.label).unwrap();
        writeln!(out, "size {n}").unwrap();
        writeln!(out, "adds {}", self.cost.adds).unwrap();
        writeln!(out, "shifts {}", self.cost.shifts).unwrap();
        writeln!(out, "entry_exp {exp}").unwrap();
        writeln!(out, "matrix").unwrap();
        for row in entries.chunks(n) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        writeln!(out, "scale").unwrap();
        for (i, s) in self.scale().iter().enumerate() {
            writeln!(out, "{} {:.17}", self.scale_expr(i), s).unwrap();
        }
        out
    }

    /// Parses the text format. The resulting kernel has a dense structure
    /// unless its matrix is recognised as an 8-point family member.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let mut label = None;
        let mut size = None;
        let mut adds = None;
        let mut shifts = None;
        let mut exp = None;
        let mut matrix: Option<Vec<i64>> = None;
        let mut listed_scale: Vec<(usize, f64)> = Vec::new();

        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        let num = |line: usize, s: &str| -> Result<i64> {
            s.parse()
                .map_err(|_| parse_err(line, format!("expected an integer, got '{s}'")))
        };

        while let Some((ln, line)) = lines.next() {
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "label" => label = Some(rest.to_string()),
                "size" => size = Some(num(ln, rest)? as usize),
                "adds" => adds = Some(num(ln, rest)? as u32),
                "shifts" => shifts = Some(num(ln, rest)? as u32),
                "entry_exp" => exp = Some(num(ln, rest)? as u32),
                "matrix" => {
                    let n =
                        size.ok_or_else(|| parse_err(ln, "'size' must precede 'matrix'".into()))?;
                    let mut cells = Vec::with_capacity(n * n);
                    for _ in 0..n {
                        let (rl, row) = lines
                            .next()
                            .ok_or_else(|| parse_err(ln, format!("expected {n} matrix rows")))?;
                        let vals: Vec<i64> = row
                            .split_whitespace()
                            .map(|t| num(rl, t))
                            .collect::<Result<_>>()?;
                        if vals.len() != n {
                            return Err(parse_err(
                                rl,
                                format!("expected {n} entries, got {}", vals.len()),
                            ));
                        }
                        cells.extend(vals);
                    }
                    matrix = Some(cells);
                }
                "scale" => {
                    let n =
                        size.ok_or_else(|| parse_err(ln, "'size' must precede 'scale'".into()))?;
                    for _ in 0..n {
                        let (rl, row) = lines
                            .next()
                            .ok_or_else(|| parse_err(ln, format!("expected {n} scale rows")))?;
                        let dec = row
                            .split_whitespace()
                            .last()
                            .and_then(|t| t.parse::<f64>().ok())
                            .ok_or_else(|| {
                                parse_err(rl, "scale row needs a decimal value".into())
                            })?;
                        listed_scale.push((rl, dec));
                    }
                }
                other => return Err(parse_err(ln, format!("unknown key '{other}'"))),
            }
        }

        let missing = |what: &str| parse_err(0, format!("missing '{what}'"));
        let n = size.ok_or_else(|| missing("size"))?;
        let entries = matrix.ok_or_else(|| missing("matrix"))?;
        let low = DyadicMatrix::new(n, n, entries, exp.unwrap_or(1))?;
        let cost = CostProfile {
            adds: adds.ok_or_else(|| missing("adds"))?,
            shifts: shifts.ok_or_else(|| missing("shifts"))?,
        };
        let structure = match recognise_parametric(&low) {
            Some(a) => Structure::Parametric(a),
            None => Structure::Dense,
        };
        let kernel = TransformKernel::new(label.unwrap_or_default(), low, cost, structure)?;
        if !listed_scale.is_empty() {
            for ((ln, dec), s) in listed_scale.iter().zip(kernel.scale()) {
                if (dec - s).abs() > 1e-12 {
                    return Err(parse_err(
                        *ln,
                        format!("scale {dec} disagrees with matrix ({s})"),
                    ));
                }
            }
        }
        Ok(kernel)
    }
}

fn recognise_parametric(low: &DyadicMatrix) -> Option<ParamVector> {
    if low.rows() != 8 || low.scale_exp() > 1 {
        return None;
    }
    let m = low.entries_at(1)?;
    let at = |i: usize, j: usize| i8::try_from(m[i * 8 + j]).ok();
    let halves = [
        at(1, 1)?,
        at(1, 2)?,
        at(3, 0)?,
        at(3, 4)?,
        at(5, 0)?,
        at(5, 3)?,
        at(7, 6)?,
        at(7, 2)?,
    ];
    let a = ParamVector::from_halves(halves).ok()?;
    (crate::class::build_t(&a) == *low).then_some(a)
}

fn apply_structure(structure: &Structure, low: &DyadicMatrix, x: &mut [f64], scratch: &mut [f64]) {
    match structure {
        Structure::Parametric(a) => {
            let arr: [f64; 8] = (&*x).try_into().expect("8-point input");
            x.copy_from_slice(&fast::apply_fast(a, &arr));
        }
        Structure::Jam { inner, inner_low } => {
            let n = x.len() / 2;
            let (halves, rest) = scratch.split_at_mut(2 * n);
            let (u, v) = halves.split_at_mut(n);
            for i in 0..n {
                u[i] = x[i] + x[2 * n - 1 - i];
                v[i] = x[i] - x[2 * n - 1 - i];
            }
            apply_structure(inner, inner_low, u, rest);
            apply_structure(inner, inner_low, v, rest);
            for k in 0..n {
                x[2 * k] = u[k];
                x[2 * k + 1] = v[k];
            }
        }
        Structure::Dense => dense_matvec(low, x, scratch, false),
    }
}

fn apply_structure_transpose(
    structure: &Structure,
    low: &DyadicMatrix,
    y: &mut [f64],
    scratch: &mut [f64],
) {
    match structure {
        Structure::Parametric(a) => {
            let arr: [f64; 8] = (&*y).try_into().expect("8-point input");
            y.copy_from_slice(&fast::apply_fast_transpose(a, &arr));
        }
        Structure::Jam { inner, inner_low } => {
            let n = y.len() / 2;
            let (halves, rest) = scratch.split_at_mut(2 * n);
            let (u, v) = halves.split_at_mut(n);
            for k in 0..n {
                u[k] = y[2 * k];
                v[k] = y[2 * k + 1];
            }
            apply_structure_transpose(inner, inner_low, u, rest);
            apply_structure_transpose(inner, inner_low, v, rest);
            for i in 0..n {
                y[i] = u[i] + v[i];
                y[2 * n - 1 - i] = u[i] - v[i];
            }
        }
        Structure::Dense => dense_matvec(low, y, scratch, true),
    }
}

fn dense_matvec(low: &DyadicMatrix, x: &mut [f64], scratch: &mut [f64], transpose: bool) {
    let n = low.rows();
    let denom = (1u64 << low.scale_exp()) as f64;
    let out = &mut scratch[..n];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..n)
            .map(|j| {
                let e = if transpose {
                    low.raw(j, i)
                } else {
                    low.raw(i, j)
                };
                e as f64 * x[j]
            })
            .sum::<f64>()
            / denom;
    }
    x.copy_from_slice(out);
}
