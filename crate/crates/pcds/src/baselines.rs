//! Comparison schemes: serial broadcasting (SBTS) and frontier edge coloring
//! (FDMAC-H).

use crate::model::{RateMatrix, Topology};
use crate::path_select::PathSet;
use crate::schedule::{hop_weight, FeasibilityFn, Pairing, Schedule, ScheduleError};

/// Serial broadcasting: the AP serves every UE in turn, one pairing per UE in
/// id order, no spatial reuse and no relaying.
pub fn sbts_schedule(
    rates: &RateMatrix,
    topo: &Topology,
    d: u64,
) -> Result<Schedule, ScheduleError> {
    let ap = topo.ap();
    let mut pairings = Vec::new();
    for u in topo.ues() {
        let c = rates.rate(ap, u);
        if c == 0 {
            return Err(ScheduleError::UnreachableLink(ap, u));
        }
        pairings.push(Pairing {
            links: vec![crate::model::Link::new(ap, u)],
            slots: hop_weight(d, c)?,
        });
    }
    Ok(Schedule { pairings })
}

/// Greedy edge coloring over the frontier of first unscheduled hops.
///
/// Each pass sorts the frontier by non-increasing weight (ties: lowest path
/// index) and packs hops into one pairing subject to the matching property and
/// the feasibility closure; the pairing then closes and the frontier advances.
pub fn fdmach_schedule(
    paths: &PathSet,
    rates: &RateMatrix,
    d: u64,
    feasible: &FeasibilityFn,
) -> Result<Schedule, ScheduleError> {
    let n = rates.n();
    let max_links = n / 2;

    let mut hop_lists: Vec<Vec<(crate::model::Link, u64)>> = Vec::new();
    for p in &paths.paths {
        let mut hops = Vec::new();
        for w in p.windows(2) {
            let c = rates.rate(w[0], w[1]);
            if c == 0 {
                return Err(ScheduleError::UnreachableLink(w[0], w[1]));
            }
            hops.push((crate::model::Link::new(w[0], w[1]), hop_weight(d, c)?));
        }
        hop_lists.push(hops);
    }

    let mut next_hop = vec![0usize; hop_lists.len()];
    let mut remaining: usize = hop_lists.iter().map(|h| h.len()).sum();
    let mut pairings = Vec::new();

    while remaining > 0 {
        let mut frontier: Vec<(usize, crate::model::Link, u64)> = hop_lists
            .iter()
            .enumerate()
            .filter(|(p, hops)| next_hop[*p] < hops.len())
            .map(|(p, hops)| {
                let (link, w) = hops[next_hop[p]];
                (p, link, w)
            })
            .collect();
        frontier.sort_by_key(|&(p, _, w)| (std::cmp::Reverse(w), p));

        let mut links = Vec::new();
        let mut slots = 0u64;
        let mut admitted = Vec::new();
        for (p, link, w) in frontier {
            if links.len() >= max_links {
                break;
            }
            if links.iter().any(|l: &crate::model::Link| l.adjacent(&link)) {
                continue;
            }
            links.push(link);
            if !feasible(&links) {
                links.pop();
                continue;
            }
            slots = slots.max(w);
            admitted.push(p);
        }
        for p in &admitted {
            next_hop[*p] += 1;
            remaining -= 1;
        }
        pairings.push(Pairing { links, slots });
    }

    Ok(Schedule { pairings })
}
