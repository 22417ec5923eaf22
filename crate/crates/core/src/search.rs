//! Exhaustive multicriteria search over the parameter space.
//!
//! Every orthogonal candidate is scored on six objectives, all minimized:
//! error energy, MSE, negated coding gain, negated efficiency, additions
//! and shifts. The result is the set of non-dominated objective vectors,
//! each carrying every parameter vector that attains it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog;
use crate::class::{is_orthogonal, orthonormalize, ParamVector, ALPHABET_HALVES, SPACE_SIZE};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricsReport};

/// Grid the real-valued objectives are snapped to before comparison, so
/// that values equal in exact arithmetic compare equal.
pub const OBJECTIVE_GRID: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObjectiveVector(pub [f64; 6]);

impl ObjectiveVector {
    pub fn from_report(r: &MetricsReport) -> Self {
        let q = |v: f64| (v / OBJECTIVE_GRID).round() * OBJECTIVE_GRID;
        ObjectiveVector([
            q(r.epsilon),
            q(r.mse),
            q(-r.cg),
            q(-r.eta),
            r.adds.unwrap_or(0) as f64,
            r.shifts.unwrap_or(0) as f64,
        ])
    }

    fn key(&self) -> [u64; 6] {
        // Total order on the snapped values; +0.0 and -0.0 collapse.
        self.0.map(|v| {
            let v = if v == 0.0 { 0.0 } else { v };
            let bits = v.to_bits();
            if bits >> 63 == 1 {
                !bits
            } else {
                bits | (1 << 63)
            }
        })
    }
}

/// `u` is no worse than `v` everywhere and strictly better somewhere.
pub fn dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> bool {
    let mut strict = false;
    for (a, b) in u.0.iter().zip(v.0.iter()) {
        if a > b {
            return false;
        }
        strict |= a < b;
    }
    strict
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub params: ParamVector,
    pub objectives: ObjectiveVector,
    pub report: MetricsReport,
}

/// A non-dominated objective vector and all parameter vectors attaining it
/// (in lexicographic order).
#[derive(Clone, Debug, Serialize)]
pub struct FrontMember {
    pub params: Vec<ParamVector>,
    pub objectives: ObjectiveVector,
    pub report: MetricsReport,
}

impl FrontMember {
    /// Catalogue labels among the member's parameter vectors.
    pub fn known_labels(&self) -> Vec<&'static str> {
        self.params.iter().filter_map(catalog::label_for).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Size of the space covered.
    pub enumerated: u64,
    pub orthogonal: usize,
    pub front_size: usize,
    /// Members that contain none of the catalogued optima.
    pub surplus: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParetoFront {
    pub rho: f64,
    pub members: Vec<FrontMember>,
    pub stats: SearchStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Test all `7^8` vectors against the orthogonality conditions.
    Scan,
    /// Solve the linear conditions first and test only the two bilinear ones.
    #[default]
    Pruned,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scan" => Ok(SearchMode::Scan),
            "pruned" => Ok(SearchMode::Pruned),
            other => Err(Error::InvalidParameter(format!(
                "unknown search mode '{other}'"
            ))),
        }
    }
}

/// Orthogonal vectors by testing every vector of the space.
pub fn enumerate_orthogonal_scan() -> Vec<ParamVector> {
    (0..SPACE_SIZE)
        .into_par_iter()
        .map(ParamVector::from_index)
        .filter(is_orthogonal)
        .collect()
}

/// Orthogonal vectors from the reduced system: `a₃, a₅, a₇, a₈` are fixed
/// by the linear conditions, leaving `7⁴` free choices to check against
/// `a₁a₂ = a₄a₆` and `a₁a₆ = a₂a₄`.
pub fn enumerate_orthogonal_pruned() -> Vec<ParamVector> {
    let mut out = Vec::new();
    for &a1 in &ALPHABET_HALVES {
        for &a2 in &ALPHABET_HALVES {
            for &a4 in &ALPHABET_HALVES {
                for &a6 in &ALPHABET_HALVES {
                    let (p, q, r, s) = (a1 as i32, a2 as i32, a4 as i32, a6 as i32);
                    if p * q == r * s && p * s == q * r {
                        out.push(
                            ParamVector::from_halves([a1, a2, a2, a4, a1, a6, a6, a4])
                                .expect("alphabet values"),
                        );
                    }
                }
            }
        }
    }
    out.sort();
    out
}

pub fn enumerate_orthogonal(mode: SearchMode) -> Vec<ParamVector> {
    match mode {
        SearchMode::Scan => enumerate_orthogonal_scan(),
        SearchMode::Pruned => enumerate_orthogonal_pruned(),
    }
}

pub fn evaluate_candidate(a: &ParamVector, rho: f64) -> Result<Candidate> {
    let kernel = orthonormalize(a)?;
    let report = metrics::evaluate(&kernel, rho)?;
    Ok(Candidate {
        params: *a,
        objectives: ObjectiveVector::from_report(&report),
        report,
    })
}

fn group(mut candidates: Vec<Candidate>) -> Vec<FrontMember> {
    // Input order must not matter; the first vector of a group supplies its report.
    candidates.sort_by_key(|c| c.params);
    let mut groups: BTreeMap<[u64; 6], FrontMember> = BTreeMap::new();
    for c in candidates {
        groups
            .entry(c.objectives.key())
            .and_modify(|m| m.params.push(c.params))
            .or_insert(FrontMember {
                params: vec![c.params],
                objectives: c.objectives,
                report: c.report,
            });
    }
    groups.into_values().collect()
}

fn non_dominated(members: Vec<FrontMember>) -> Vec<FrontMember> {
    let keep: Vec<bool> = members
        .iter()
        .map(|m| {
            !members
                .iter()
                .any(|o| dominates(&o.objectives, &m.objectives))
        })
        .collect();
    members
        .into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect()
}

fn front_order(a: &FrontMember, b: &FrontMember) -> std::cmp::Ordering {
    let (x, y) = (&a.objectives.0, &b.objectives.0);
    x[4].total_cmp(&y[4])
        .then(x[5].total_cmp(&y[5]))
        .then(x[0].total_cmp(&y[0]))
        .then_with(|| a.objectives.key().cmp(&b.objectives.key()))
}

/// Non-dominated subset of `candidates`, grouped by objective vector.
///
/// Local fronts are computed per chunk in parallel, merged, and filtered
/// once more; the output order is fixed by `(adds, shifts, ε)`.
pub fn pareto_front_of(candidates: Vec<Candidate>) -> Vec<FrontMember> {
    let grouped = group(candidates);
    let merged: Vec<FrontMember> = grouped
        .par_chunks(64)
        .flat_map_iter(|chunk| non_dominated(chunk.to_vec()))
        .collect();
    let mut front = non_dominated(merged);
    front.sort_by(front_order);
    front
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub rho: f64,
    pub mode: SearchMode,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            rho: crate::linalg::DEFAULT_RHO,
            mode: SearchMode::default(),
            workers: None,
        }
    }
}

pub fn pareto_search(opts: &SearchOptions) -> Result<ParetoFront> {
    if opts.rho.is_nan() || opts.rho.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "correlation {} must satisfy |rho| < 1",
            opts.rho
        )));
    }
    let run = || -> Result<ParetoFront> {
        let orthogonal = enumerate_orthogonal(opts.mode);
        let candidates: Vec<Candidate> = orthogonal
            .par_iter()
            .map(|a| evaluate_candidate(a, opts.rho))
            .collect::<Result<_>>()?;
        let members = pareto_front_of(candidates);
        let surplus = members
            .iter()
            .filter(|m| m.known_labels().is_empty())
            .count();
        Ok(ParetoFront {
            rho: opts.rho,
            stats: SearchStats {
                enumerated: SPACE_SIZE,
                orthogonal: orthogonal.len(),
                front_size: members.len(),
                surplus,
            },
            members,
        })
    };
    match opts.workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(run),
    }
}

pub const FRONT_CSV_HEADER: &str = "label,epsilon,mse,cg_db,eta_pct,adds,shifts,catalogued,params";

/// One row per member, sorted by `(adds, shifts, ε)`.
pub fn front_report_csv(front: &ParetoFront) -> String {
    let mut out = String::from(FRONT_CSV_HEADER);
    out.push('\n');
    let mut members: Vec<&FrontMember> = front.members.iter().collect();
    members.sort_by(|a, b| front_order(a, b));
    for m in members {
        let labels = m.known_labels();
        let label = labels
            .first()
            .map_or_else(|| format!("a={}", m.params[0]), |l| l.to_string());
        let params: Vec<String> = m.params.iter().map(|p| p.to_string()).collect();
        let r = &m.report;
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{},{},{}\n",
            label,
            r.epsilon,
            r.mse,
            r.cg,
            r.eta,
            r.adds.unwrap_or_default(),
            r.shifts.unwrap_or_default(),
            if labels.is_empty() { "no" } else { "yes" },
            params.join(";")
        ));
    }
    out
}

pub fn front_report_json(front: &ParetoFront) -> serde_json::Value {
    let members: Vec<serde_json::Value> = front
        .members
        .iter()
        .map(|m| {
            serde_json::json!({
                "labels": m.known_labels(),
                "params": m.params,
                "epsilon": m.report.epsilon,
                "mse": m.report.mse,
                "cg_db": m.report.cg,
                "eta_pct": m.report.eta,
                "adds": m.report.adds,
                "shifts": m.report.shifts,
            })
        })
        .collect();
    serde_json::json!({
        "rho": front.rho,
        "stats": front.stats,
        "members": members,
    })
}
