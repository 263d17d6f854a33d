//! Property tests for the physical model, path selection, and scheduling
//! invariants.

use proptest::prelude::*;

use pcds::experiment::random_instance;
use pcds::model::{
    interference_power, pairing_feasible, received_power, sinr, InterferenceMode, Link, Node,
    Point, RadioParams, Topology,
};
use pcds::path_select::{max_hops_bound, select_paths};
use pcds::schedule::{schedule, validate_schedule};

fn line_topology(xs: &[f64]) -> Topology {
    let nodes = xs
        .iter()
        .enumerate()
        .map(|(id, &x)| Node {
            id,
            position: Point { x, y: 0.0 },
            is_ap: id == 0,
        })
        .collect();
    Topology::new(nodes, (1000.0, 1000.0)).unwrap()
}

/// Disjoint unit-length links laid out left to right; link i connects nodes
/// 2i and 2i+1. Never adjacent to each other.
fn parallel_links_topology(n_links: usize, spacing: f64) -> (Topology, Vec<Link>) {
    let mut nodes = Vec::new();
    for i in 0..n_links {
        let base = i as f64 * spacing;
        nodes.push(Node {
            id: 2 * i,
            position: Point { x: base, y: 0.0 },
            is_ap: i == 0,
        });
        nodes.push(Node {
            id: 2 * i + 1,
            position: Point { x: base + 1.0, y: 0.0 },
            is_ap: false,
        });
    }
    let topo = Topology::new(nodes, (1e6, 1e6)).unwrap();
    let links = (0..n_links).map(|i| Link::new(2 * i, 2 * i + 1)).collect();
    (topo, links)
}

proptest! {
    #[test]
    fn received_power_decreases_with_distance(l1 in 0.5f64..50.0, gap in 0.1f64..50.0) {
        let params = RadioParams::default();
        let topo = line_topology(&[0.0, l1, l1 + gap]);
        let near = received_power(&params, Link::new(0, 1), &topo).unwrap();
        let far = received_power(&params, Link::new(0, 2), &topo).unwrap();
        prop_assert!(far < near);
    }

    #[test]
    fn interference_is_additive(n1 in 1usize..4, n2 in 1usize..4, spacing in 3.0f64..20.0) {
        let params = RadioParams::default();
        let (topo, links) = parallel_links_topology(1 + n1 + n2, spacing);
        let victim = links[0];
        let s1 = &links[1..1 + n1];
        let s2 = &links[1 + n1..1 + n1 + n2];
        let both: Vec<Link> = s1.iter().chain(s2).copied().collect();
        let i1 = interference_power(&params, victim, s1, &topo).unwrap();
        let i2 = interference_power(&params, victim, s2, &topo).unwrap();
        let i12 = interference_power(&params, victim, &both, &topo).unwrap();
        prop_assert!((i12 - (i1 + i2)).abs() <= 1e-12 * (1.0 + i12));
    }

    #[test]
    fn sinr_degrades_monotonically(n in 2usize..6, spacing in 3.0f64..20.0) {
        let params = RadioParams::default();
        let (topo, links) = parallel_links_topology(1 + n, spacing);
        let victim = links[0];
        let subset = &links[1..n];
        let superset = &links[1..=n];
        let a = sinr(&params, victim, subset, &topo).unwrap();
        let b = sinr(&params, victim, superset, &topo).unwrap();
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn infeasible_pairings_stay_infeasible_under_supersets(
        n in 2usize..6,
        spacing in 0.5f64..3.0,
    ) {
        // tight spacing so SINR mode has a chance to reject
        let mut params = RadioParams::default();
        params.mui_factor = 0.5;
        let (topo, links) = parallel_links_topology(n + 1, spacing);
        let rates = pcds::model::rate_matrix_from_topology(
            &topo,
            &pcds::model::DistRateMap::default(),
        );
        for cut in 1..links.len() {
            let smaller = &links[..cut];
            let larger = &links[..cut + 1];
            let small_ok =
                pairing_feasible(&params, smaller, &rates, &topo, InterferenceMode::Sinr);
            let large_ok =
                pairing_feasible(&params, larger, &rates, &topo, InterferenceMode::Sinr);
            if !small_ok {
                prop_assert!(!large_ok);
            }
        }
    }

    #[test]
    fn adjacency_only_mode_ignores_positions(seed in 0u64..500) {
        // same link structure on two different geometries
        let (t1, links) = parallel_links_topology(4, 2.0 + (seed % 7) as f64);
        let (t2, _) = parallel_links_topology(4, 20.0 + (seed % 13) as f64);
        let params = RadioParams::default();
        let r1 = pcds::model::rate_matrix_from_topology(&t1, &pcds::model::DistRateMap::default());
        let r2 = pcds::model::rate_matrix_from_topology(&t2, &pcds::model::DistRateMap::default());
        let a = pairing_feasible(&params, &links, &r1, &t1, InterferenceMode::Off);
        let b = pairing_feasible(&params, &links, &r2, &t2, InterferenceMode::Off);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn path_selection_invariants(seed in 0u64..2000, n_ues in 2usize..12, h_max in 1usize..6) {
        let (topo, rates) = random_instance(n_ues, seed);
        let paths = select_paths(&rates, &topo, h_max);

        // every UE exactly once as a receiver
        let mut rx = paths.receivers();
        rx.sort_unstable();
        prop_assert_eq!(rx, topo.ues());

        // node-disjoint except at the AP; every path starts at the AP
        let mut seen = std::collections::HashSet::new();
        for p in &paths.paths {
            prop_assert_eq!(p[0], topo.ap());
            for &node in &p[1..] {
                prop_assert!(seen.insert(node));
            }
        }

        // hop caps: configured and structural
        let bound = max_hops_bound(n_ues);
        for (i, _) in paths.paths.iter().enumerate() {
            prop_assert!(paths.hop_count(i) <= h_max.min(bound));
        }

        // determinism
        let again = select_paths(&rates, &topo, h_max);
        prop_assert_eq!(paths, again);
    }

    #[test]
    fn schedule_invariants(seed in 0u64..1500, n_ues in 2usize..10, d in 1u64..12) {
        let (topo, rates) = random_instance(n_ues, seed);
        let h_max = max_hops_bound(n_ues);
        let paths = select_paths(&rates, &topo, h_max);
        let sched = schedule(&paths, &rates, d, &|_: &[_]| true).unwrap();

        prop_assert!(validate_schedule(&sched, &paths, d, &rates).passed());
        let max_links = topo.n() / 2;
        for pairing in &sched.pairings {
            prop_assert!(pairing.links.len() <= max_links);
            // slot count is exactly the heaviest admitted hop
            let heaviest = pairing
                .links
                .iter()
                .map(|l| d.div_ceil(rates.rate(l.tx, l.rx) as u64))
                .max()
                .unwrap_or(0);
            prop_assert_eq!(pairing.slots, heaviest);
        }

        let again = schedule(&paths, &rates, d, &|_: &[_]| true).unwrap();
        prop_assert_eq!(sched, again);
    }

    #[test]
    fn sinr_mode_schedules_stay_valid(seed in 0u64..300, d in 1u64..8) {
        let (topo, rates) = random_instance(6, seed);
        let params = RadioParams::default();
        let paths = select_paths(&rates, &topo, 3);
        let feasible = |links: &[Link]| {
            pairing_feasible(&params, links, &rates, &topo, InterferenceMode::Sinr)
        };
        let sched = schedule(&paths, &rates, d, &feasible).unwrap();
        prop_assert!(validate_schedule(&sched, &paths, d, &rates).passed());
        for pairing in &sched.pairings {
            prop_assert!(pairing_feasible(
                &params,
                &pairing.links,
                &rates,
                &topo,
                InterferenceMode::Sinr
            ));
        }
    }
}

#[test]
fn rate_matrix_entries_in_configured_set() {
    for seed in 0..50 {
        let (topo, rates) = random_instance(10, seed);
        for i in 0..topo.n() {
            for j in 0..topo.n() {
                let c = rates.rate(i, j);
                if i == j {
                    assert_eq!(c, 0);
                } else {
                    assert!((1..=3).contains(&c));
                }
            }
        }
    }
}
