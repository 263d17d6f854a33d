//! Cross-checks of the branch-and-bound scheduler against an independent
//! exhaustive dynamic program, and heuristic-vs-exact sanity checks.

use std::collections::HashMap;

use pcds::baselines::fdmach_schedule;
use pcds::experiment::random_instance;
use pcds::milp::solve_exact;
use pcds::model::Link;
use pcds::path_select::{max_hops_bound, select_paths};
use pcds::schedule::{hop_weight, schedule, validate_schedule, FeasibilityFn};

/// Exhaustive minimum-makespan oracle: dynamic program over frontier states.
/// Branches on every feasible non-empty subset of the frontier (no dominance
/// reasoning, no incumbent pruning), so it shares no shortcuts with the
/// production solver.
fn exhaustive_optimum(hop_lists: &[Vec<(Link, u64)>], feasible: &FeasibilityFn) -> u64 {
    fn subsets(
        frontier: &[(usize, Link, u64)],
        feasible: &FeasibilityFn,
    ) -> Vec<(Vec<usize>, u64)> {
        let mut out = Vec::new();
        let m = frontier.len();
        for mask in 1u32..(1 << m) {
            let picked: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let links: Vec<Link> = picked.iter().map(|&i| frontier[i].1).collect();
            let matching = links
                .iter()
                .enumerate()
                .all(|(i, a)| links[i + 1..].iter().all(|b| !a.adjacent(b)));
            if matching && feasible(&links) {
                let slots = picked.iter().map(|&i| frontier[i].2).max().unwrap();
                out.push((picked.iter().map(|&i| frontier[i].0).collect(), slots));
            }
        }
        out
    }

    fn go(
        state: &[usize],
        hop_lists: &[Vec<(Link, u64)>],
        feasible: &FeasibilityFn,
        memo: &mut HashMap<Vec<usize>, u64>,
    ) -> u64 {
        if state
            .iter()
            .zip(hop_lists)
            .all(|(&f, hops)| f >= hops.len())
        {
            return 0;
        }
        if let Some(&v) = memo.get(state) {
            return v;
        }
        let frontier: Vec<(usize, Link, u64)> = hop_lists
            .iter()
            .enumerate()
            .filter(|(p, hops)| state[*p] < hops.len())
            .map(|(p, hops)| {
                let (link, w) = hops[state[p]];
                (p, link, w)
            })
            .collect();
        let mut best = u64::MAX;
        for (paths_advanced, slots) in subsets(&frontier, feasible) {
            let mut next = state.to_vec();
            for p in paths_advanced {
                next[p] += 1;
            }
            let rest = go(&next, hop_lists, feasible, memo);
            best = best.min(slots + rest);
        }
        memo.insert(state.to_vec(), best);
        best
    }

    let start = vec![0usize; hop_lists.len()];
    go(&start, hop_lists, feasible, &mut HashMap::new())
}

fn always(_: &[Link]) -> bool {
    true
}

#[test]
fn exact_solver_matches_exhaustive_enumeration() {
    for seed in 0..40 {
        for d in [1u64, 3, 6] {
            let (topo, rates) = random_instance(4, seed);
            let paths = select_paths(&rates, &topo, max_hops_bound(4));
            let hop_lists: Vec<Vec<(Link, u64)>> = paths
                .paths
                .iter()
                .map(|p| {
                    p.windows(2)
                        .map(|w| {
                            let c = rates.rate(w[0], w[1]);
                            (Link::new(w[0], w[1]), hop_weight(d, c).unwrap())
                        })
                        .collect()
                })
                .collect();
            let oracle = exhaustive_optimum(&hop_lists, &always);
            let sol = solve_exact(&paths, &rates, d, &always, 10_000_000).unwrap();
            assert!(sol.proven_optimal, "seed {seed} d {d}: budget exhausted");
            assert_eq!(
                sol.objective, oracle,
                "seed {seed} d {d}: solver {} vs enumeration {}",
                sol.objective, oracle
            );
            assert_eq!(sol.schedule.total_slots(), sol.objective);
            assert!(validate_schedule(&sol.schedule, &paths, d, &rates).passed());
        }
    }
}

#[test]
fn exact_solver_matches_enumeration_on_fixture_paths() {
    let rates = pcds::fixture::six_ue_rates();
    let paths = pcds::fixture::six_ue_paths();
    for d in 1..=10u64 {
        let hop_lists: Vec<Vec<(Link, u64)>> = paths
            .paths
            .iter()
            .map(|p| {
                p.windows(2)
                    .map(|w| {
                        let c = rates.rate(w[0], w[1]);
                        (Link::new(w[0], w[1]), hop_weight(d, c).unwrap())
                    })
                    .collect()
            })
            .collect();
        let oracle = exhaustive_optimum(&hop_lists, &always);
        let sol = solve_exact(&paths, &rates, d, &always, 10_000_000).unwrap();
        assert!(sol.proven_optimal);
        assert_eq!(sol.objective, oracle, "d = {d}");
    }
}

#[test]
fn heuristics_never_beat_the_exact_solver() {
    for seed in 100..160 {
        let (topo, rates) = random_instance(6, seed);
        let paths = select_paths(&rates, &topo, max_hops_bound(6));
        let d = 2 + seed % 7;
        let exact = solve_exact(&paths, &rates, d, &always, 10_000_000).unwrap();
        assert!(exact.proven_optimal);

        let greedy = schedule(&paths, &rates, d, &always).unwrap();
        assert!(
            greedy.total_slots() >= exact.objective,
            "seed {seed}: greedy {} below optimum {}",
            greedy.total_slots(),
            exact.objective
        );

        let frontier = fdmach_schedule(&paths, &rates, d, &always).unwrap();
        assert!(frontier.total_slots() >= exact.objective);
    }
}
