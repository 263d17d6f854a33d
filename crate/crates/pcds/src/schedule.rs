//! Concurrent transmission scheduling.
//!
//! Packs path hops into an ordered sequence of pairings. Each pairing is a
//! matching of links transmitting concurrently for `slots` time slots;
//! precedence along every path is preserved, and the per-pairing slot count
//! is the largest hop weight admitted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Link;
use crate::model::RateMatrix;
use crate::path_select::PathSet;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("rate zero cannot carry demand")]
    ZeroRate,
    #[error("link {0}->{1} has rate zero and can never complete demand")]
    UnreachableLink(usize, usize),
}

/// One scheduling stage: a matching of links active for `slots` slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub links: Vec<Link>,
    pub slots: u64,
}

/// Ordered pairings covering every hop of the input paths exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub pairings: Vec<Pairing>,
}

impl Schedule {
    pub fn total_slots(&self) -> u64 {
        self.pairings.iter().map(|p| p.slots).sum()
    }
}

/// Slots needed to push `d` packets over a link of rate `c` packets/slot.
pub fn hop_weight(d: u64, c: u32) -> Result<u64, ScheduleError> {
    if c == 0 {
        return Err(ScheduleError::ZeroRate);
    }
    Ok(d.div_ceil(c as u64))
}

/// Feasibility test a scheduler consults before keeping a link in a pairing.
/// Adjacency is always enforced by the schedulers themselves; this closure
/// adds (or skips) the SINR check.
pub type FeasibilityFn<'a> = dyn Fn(&[Link]) -> bool + 'a;

/// Greedy concurrent transmission scheduling over the selected paths.
///
/// Per pairing: repeatedly visit the unvisited path with the most unscheduled
/// hops (heaviest first hop on ties), admit its first unscheduled hop if it is
/// non-adjacent to the pairing and the pairing stays feasible, and track the
/// pairing slot count as the max admitted weight. A pairing closes when it
/// holds floor(n/2) links or every remaining path has been visited.
pub fn schedule(
    paths: &PathSet,
    rates: &RateMatrix,
    d: u64,
    feasible: &FeasibilityFn,
) -> Result<Schedule, ScheduleError> {
    schedule_counted(paths, rates, d, feasible).map(|(s, _)| s)
}

/// Same as [`schedule`], also returning an operation counter for complexity
/// instrumentation.
pub fn schedule_counted(
    paths: &PathSet,
    rates: &RateMatrix,
    d: u64,
    feasible: &FeasibilityFn,
) -> Result<(Schedule, u64), ScheduleError> {
    let n = rates.n();
    let max_links = n / 2;
    let mut ops: u64 = 0;

    // per-path hop list with precomputed weights
    let mut hop_lists: Vec<Vec<(Link, u64)>> = Vec::new();
    for p in &paths.paths {
        let mut hops = Vec::new();
        for w in p.windows(2) {
            let c = rates.rate(w[0], w[1]);
            if c == 0 {
                return Err(ScheduleError::UnreachableLink(w[0], w[1]));
            }
            hops.push((Link::new(w[0], w[1]), hop_weight(d, c)?));
        }
        hop_lists.push(hops);
    }

    let n_paths = hop_lists.len();
    let mut next_hop = vec![0usize; n_paths]; // F_p - 1
    let mut remaining: u64 = hop_lists.iter().map(|h| h.len() as u64).sum();
    let mut pairings = Vec::new();

    while remaining > 0 {
        let mut links: Vec<Link> = Vec::new();
        let mut slots: u64 = 0;
        let mut endpoints = vec![false; n];
        let mut visited = vec![false; n_paths];

        loop {
            if links.len() >= max_links {
                break;
            }
            // unvisited paths with unscheduled hops, most-hops first, then
            // largest first-hop weight, then lowest path index
            let candidate = (0..n_paths)
                .inspect(|_| ops += 1)
                .filter(|&p| !visited[p] && next_hop[p] < hop_lists[p].len())
                .max_by_key(|&p| {
                    let unscheduled = hop_lists[p].len() - next_hop[p];
                    let weight = hop_lists[p][next_hop[p]].1;
                    (unscheduled, weight, std::cmp::Reverse(p))
                });
            let Some(p) = candidate else { break };
            visited[p] = true;

            let (link, weight) = hop_lists[p][next_hop[p]];
            if endpoints[link.tx] || endpoints[link.rx] {
                continue;
            }
            links.push(link);
            ops += links.len() as u64;
            if !feasible(&links) {
                // hop stays eligible for later pairings
                links.pop();
                continue;
            }
            endpoints[link.tx] = true;
            endpoints[link.rx] = true;
            slots = slots.max(weight);
            next_hop[p] += 1;
            remaining -= 1;
        }

        pairings.push(Pairing { links, slots });
    }

    Ok((Schedule { pairings }, ops))
}

/// Which constraint family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintFamily {
    /// Every hop scheduled exactly once.
    CoverageOnce,
    /// Each pairing long enough to push the full demand over its links.
    DemandCompletion,
    /// Hops of a path appear in pairing order.
    Precedence,
    /// Links within a pairing pairwise non-adjacent.
    Matching,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub family: ConstraintFamily,
    pub detail: String,
}

/// Result of checking a concrete schedule against the constraint families.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn family_passed(&self, family: ConstraintFamily) -> bool {
        !self.violations.iter().any(|v| v.family == family)
    }
}

/// Check a schedule against the downloading constraints: coverage-once,
/// demand completion, precedence, and the matching property. All violations
/// are collected, none thrown.
pub fn validate_schedule(
    sched: &Schedule,
    paths: &PathSet,
    d: u64,
    rates: &RateMatrix,
) -> ValidationReport {
    let mut violations = Vec::new();

    // position of each link in the pairing sequence
    let mut occurrences: std::collections::HashMap<Link, Vec<usize>> = Default::default();
    for (k, pairing) in sched.pairings.iter().enumerate() {
        for link in &pairing.links {
            occurrences.entry(*link).or_default().push(k);
        }
    }

    let hops = paths.hops();
    for hop in &hops {
        match occurrences.get(hop).map(|v| v.len()).unwrap_or(0) {
            1 => {}
            0 => violations.push(Violation {
                family: ConstraintFamily::CoverageOnce,
                detail: format!("hop {}->{} never scheduled", hop.tx, hop.rx),
            }),
            k => violations.push(Violation {
                family: ConstraintFamily::CoverageOnce,
                detail: format!("hop {}->{} scheduled {} times", hop.tx, hop.rx, k),
            }),
        }
    }
    for (link, occ) in &occurrences {
        if !hops.contains(link) {
            violations.push(Violation {
                family: ConstraintFamily::CoverageOnce,
                detail: format!(
                    "link {}->{} scheduled {} times but is not a path hop",
                    link.tx,
                    link.rx,
                    occ.len()
                ),
            });
        }
    }

    // demand completion: slots * rate >= d for every scheduled hop
    for (k, pairing) in sched.pairings.iter().enumerate() {
        for link in &pairing.links {
            let c = rates.rate(link.tx, link.rx) as u64;
            if pairing.slots * c < d {
                violations.push(Violation {
                    family: ConstraintFamily::DemandCompletion,
                    detail: format!(
                        "pairing {} gives {}x{} = {} < {} packets on {}->{}",
                        k,
                        pairing.slots,
                        c,
                        pairing.slots * c,
                        d,
                        link.tx,
                        link.rx
                    ),
                });
            }
        }
    }

    // precedence along each path
    for (pi, path) in paths.paths.iter().enumerate() {
        let mut prev: Option<usize> = None;
        for w in path.windows(2) {
            let hop = Link::new(w[0], w[1]);
            let Some(occ) = occurrences.get(&hop).filter(|v| v.len() == 1) else {
                prev = None; // coverage violation already recorded
                continue;
            };
            let k = occ[0];
            if let Some(pk) = prev {
                if k <= pk {
                    violations.push(Violation {
                        family: ConstraintFamily::Precedence,
                        detail: format!(
                            "path {}: hop {}->{} in pairing {} not after pairing {}",
                            pi, hop.tx, hop.rx, k, pk
                        ),
                    });
                }
            }
            prev = Some(k);
        }
    }

    // matching within each pairing
    for (k, pairing) in sched.pairings.iter().enumerate() {
        for (i, a) in pairing.links.iter().enumerate() {
            for b in &pairing.links[i + 1..] {
                if a.adjacent(b) {
                    violations.push(Violation {
                        family: ConstraintFamily::Matching,
                        detail: format!(
                            "pairing {}: links {}->{} and {}->{} share a node",
                            k, a.tx, a.rx, b.tx, b.rx
                        ),
                    });
                }
            }
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    fn adjacency_only(_: &[Link]) -> bool {
        true
    }

    #[test]
    fn hop_weight_examples() {
        assert_eq!(hop_weight(6, 3).unwrap(), 2);
        assert_eq!(hop_weight(6, 2).unwrap(), 3);
        assert_eq!(hop_weight(0, 1).unwrap(), 0);
        assert_eq!(hop_weight(7, 3).unwrap(), 3);
        assert!(hop_weight(5, 0).is_err());
    }

    #[test]
    fn six_ue_fixture_schedule() {
        let (rates, topo) = fixture::six_ue();
        let paths = crate::path_select::select_paths(&rates, &topo, 3);
        let sched = schedule(&paths, &rates, 6, &adjacency_only).unwrap();
        assert_eq!(sched.pairings.len(), 3);
        assert_eq!(sched.total_slots(), 8);
        assert_eq!(sched.pairings[0].links, vec![Link::new(6, 0)]);
        assert_eq!(sched.pairings[0].slots, 2);
        assert_eq!(
            sched.pairings[1].links,
            vec![Link::new(0, 3), Link::new(6, 1)]
        );
        assert_eq!(sched.pairings[1].slots, 3);
        assert_eq!(
            sched.pairings[2].links,
            vec![Link::new(1, 5), Link::new(6, 2), Link::new(3, 4)]
        );
        assert_eq!(sched.pairings[2].slots, 3);
        assert!(validate_schedule(&sched, &paths, 6, &rates).passed());
    }

    #[test]
    fn single_hop_path() {
        let (rates, _topo) = fixture::six_ue();
        let paths = PathSet { paths: vec![vec![6, 0]] };
        let sched = schedule(&paths, &rates, 6, &adjacency_only).unwrap();
        assert_eq!(sched.pairings.len(), 1);
        assert_eq!(sched.total_slots(), 2); // rate 3, d = 6
    }

    #[test]
    fn validation_catches_constructed_violations() {
        let (rates, topo) = fixture::six_ue();
        let paths = crate::path_select::select_paths(&rates, &topo, 3);
        let good = schedule(&paths, &rates, 6, &adjacency_only).unwrap();

        // swap the hops of one path across pairings -> precedence violation
        let mut swapped = good.clone();
        let a = swapped.pairings[0].links[0];
        let b = swapped.pairings[1].links[0];
        swapped.pairings[0].links[0] = b;
        swapped.pairings[1].links[0] = a;
        let report = validate_schedule(&swapped, &paths, 6, &rates);
        assert!(!report.family_passed(ConstraintFamily::Precedence));

        // shrink delta below a max-weight hop -> completion violation
        let mut short = good.clone();
        short.pairings[1].slots -= 1;
        let report = validate_schedule(&short, &paths, 6, &rates);
        assert!(!report.family_passed(ConstraintFamily::DemandCompletion));

        // duplicate a link within a pairing's partner pairing -> coverage violation
        let mut dup = good.clone();
        let l = dup.pairings[0].links[0];
        dup.pairings[2].links.push(l);
        let report = validate_schedule(&dup, &paths, 6, &rates);
        assert!(!report.family_passed(ConstraintFamily::CoverageOnce));
    }
}
