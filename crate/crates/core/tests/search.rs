use std::collections::BTreeSet;

use proptest::prelude::*;

use mpdct::catalog::OPTIMA;
use mpdct::class::{is_orthogonal, ParamVector, SPACE_SIZE};
use mpdct::search::{
    enumerate_orthogonal, evaluate_candidate, front_report_csv, front_report_json, pareto_front_of,
    pareto_search, Candidate, SearchMode, SearchOptions,
};

fn all_candidates() -> Vec<Candidate> {
    enumerate_orthogonal(SearchMode::Pruned)
        .iter()
        .map(|a| evaluate_candidate(a, 0.95).unwrap())
        .collect()
}

/// Quadratic-time reference: a vector survives when no candidate is at
/// least as good in all six objectives and better in one.
fn brute_force_front(cands: &[Candidate]) -> BTreeSet<ParamVector> {
    cands
        .iter()
        .filter(|c| {
            !cands.iter().any(|o| {
                let (u, v) = (&o.objectives.0, &c.objectives.0);
                u.iter().zip(v).all(|(x, y)| x <= y) && u.iter().zip(v).any(|(x, y)| x < y)
            })
        })
        .map(|c| c.params)
        .collect()
}

fn front_params(cands: Vec<Candidate>) -> BTreeSet<ParamVector> {
    pareto_front_of(cands)
        .into_iter()
        .flat_map(|m| m.params)
        .collect()
}

#[test]
fn full_front_matches_brute_force() {
    let cands = all_candidates();
    assert_eq!(cands.len(), 169);
    assert_eq!(front_params(cands.clone()), brute_force_front(&cands));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subset_front_matches_brute_force(mask in proptest::collection::vec(any::<bool>(), 169)) {
        let subset: Vec<Candidate> = all_candidates()
            .into_iter()
            .zip(&mask)
            .filter_map(|(c, &keep)| keep.then_some(c))
            .collect();
        prop_assert_eq!(front_params(subset.clone()), brute_force_front(&subset));
    }

    #[test]
    fn front_ignores_candidate_order(seed in any::<u64>()) {
        let cands = all_candidates();
        let mut shuffled = cands.clone();
        let n = shuffled.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = pareto_front_of(cands);
        let b = pareto_front_of(shuffled);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(&x.params, &y.params);
        }
    }
}

#[test]
fn scan_and_pruned_agree() {
    assert_eq!(
        enumerate_orthogonal(SearchMode::Scan),
        enumerate_orthogonal(SearchMode::Pruned)
    );
    let scan = (0..SPACE_SIZE)
        .step_by(997)
        .map(ParamVector::from_index)
        .filter(is_orthogonal)
        .count();
    assert!(scan <= 169);
}

#[test]
fn front_is_deterministic_across_worker_counts() {
    let run = |workers| {
        let front = pareto_search(&SearchOptions {
            rho: 0.95,
            mode: SearchMode::Pruned,
            workers,
        })
        .unwrap();
        (
            front_report_csv(&front),
            front_report_json(&front).to_string(),
        )
    };
    let one = run(Some(1));
    assert_eq!(one, run(Some(3)));
    assert_eq!(one, run(None));
}

#[test]
fn front_holds_every_catalogued_optimum() {
    let front = pareto_search(&SearchOptions::default()).unwrap();
    for o in OPTIMA.iter() {
        assert!(
            front.members.iter().any(|m| m.params.contains(&o.params())),
            "{}",
            o.label
        );
    }
    assert_eq!(front.stats.enumerated, SPACE_SIZE);
    assert_eq!(front.stats.orthogonal, 169);
    assert_eq!(front.stats.front_size, front.members.len());
    assert_eq!(front.stats.front_size, OPTIMA.len() + front.stats.surplus);
    assert_eq!(front.stats.surplus, 3);
}

#[test]
fn csv_lists_members_by_cost() {
    let front = pareto_search(&SearchOptions::default()).unwrap();
    let csv = front_report_csv(&front);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), mpdct::search::FRONT_CSV_HEADER);
    let costs: Vec<(u32, u32)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[5].parse().unwrap(), f[6].parse().unwrap())
        })
        .collect();
    assert!(costs.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(costs.first(), Some(&(14, 0)));
}

#[test]
fn rejects_invalid_correlation() {
    for rho in [1.0, -1.0, 1.5, f64::NAN] {
        let opts = SearchOptions {
            rho,
            ..SearchOptions::default()
        };
        assert!(pareto_search(&opts).is_err(), "rho = {rho}");
    }
}
