//! Transmission path selection.
//!
//! Builds AP-rooted multi-hop downloading paths greedily on per-hop rates.
//! Each UE receives the content exactly once and relays it to at most one
//! other UE; paths are capped at `h_max` hops. Argmax ties are broken by
//! lowest node id so the output is deterministic.

use serde::{Deserialize, Serialize};

use crate::model::{Link, RateMatrix, Topology};

/// The AP-rooted downloading paths chosen for one frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet {
    /// Node-id sequences, each starting at the AP.
    pub paths: Vec<Vec<usize>>,
}

impl PathSet {
    /// Downloading source of each UE that appears in the paths.
    pub fn source_of(&self, ue: usize) -> Option<usize> {
        for path in &self.paths {
            for w in path.windows(2) {
                if w[1] == ue {
                    return Some(w[0]);
                }
            }
        }
        None
    }

    pub fn hop_count(&self, path_idx: usize) -> usize {
        self.paths[path_idx].len() - 1
    }

    pub fn last_node(&self, path_idx: usize) -> usize {
        *self.paths[path_idx].last().unwrap()
    }

    /// All hops as directed links, path-major in hop order.
    pub fn hops(&self) -> Vec<Link> {
        self.paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| Link::new(w[0], w[1])))
            .collect()
    }

    /// All receivers across paths, i.e. every covered UE.
    pub fn receivers(&self) -> Vec<usize> {
        self.paths
            .iter()
            .flat_map(|p| p[1..].iter().copied())
            .collect()
    }

    pub fn max_hop_count(&self) -> usize {
        self.paths.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }
}

/// Structural cap on path length: hop counts across paths grow as 1,2,3,...
/// when every UE relays once, so no path can exceed this bound.
pub fn max_hops_bound(n_ues: usize) -> usize {
    assert!(n_ues >= 1);
    let v = ((1.0 + 8.0 * n_ues as f64).sqrt() - 1.0) / 2.0;
    v.ceil() as usize
}

/// Greedy rate-maximizing path selection.
///
/// An `h_max` above the structural bound is clamped; the bound makes larger
/// values inert.
pub fn select_paths(rates: &RateMatrix, topo: &Topology, h_max: usize) -> PathSet {
    select_paths_counted(rates, topo, h_max).0
}

/// Same as [`select_paths`], also returning the number of candidate-scan
/// operations performed (complexity instrumentation).
pub fn select_paths_counted(rates: &RateMatrix, topo: &Topology, h_max: usize) -> (PathSet, u64) {
    assert!(h_max >= 1, "h_max must be at least 1");
    let ap = topo.ap();
    let ues = topo.ues();
    assert!(!ues.is_empty(), "need at least one UE");
    let h_max = h_max.min(max_hops_bound(ues.len()));

    let n = topo.n();
    let mut ops: u64 = 0;

    let mut selected = vec![false; n]; // b_u
    let mut relayed = vec![false; n]; // r_u; the AP stays false throughout
    let mut covered: Vec<usize> = Vec::new(); // U_b
    let mut uncovered: Vec<usize> = ues.clone(); // U_c
    let mut paths: Vec<Vec<usize>> = Vec::new();

    while !uncovered.is_empty() {
        let mut batch: Vec<usize> = Vec::new(); // U_t

        if covered.len() < uncovered.len() {
            // Reach out from the covered side: new AP path plus one extension
            // per eligible path tail.
            let u = *uncovered
                .iter()
                .inspect(|_| ops += 1)
                .max_by_key(|&&u| (rates.rate(ap, u), std::cmp::Reverse(u)))
                .unwrap();
            paths.push(vec![ap, u]);
            selected[u] = true;
            batch.push(u);

            for &src in &covered {
                ops += 1;
                if relayed[src] {
                    continue; // interior nodes have relayed already
                }
                let p = paths
                    .iter_mut()
                    .find(|p| *p.last().unwrap() == src)
                    .expect("a non-relayed covered UE terminates some path");
                if p.len() - 1 >= h_max {
                    continue;
                }
                let candidate = uncovered
                    .iter()
                    .inspect(|_| ops += 1)
                    .filter(|&&v| !selected[v])
                    .max_by_key(|&&v| (rates.rate(src, v), std::cmp::Reverse(v)))
                    .copied();
                if let Some(v) = candidate {
                    p.push(v);
                    selected[v] = true;
                    relayed[src] = true;
                    batch.push(v);
                }
            }
        } else {
            // Reach out from the uncovered side: pick each orphan's best source
            // among eligible path tails, falling back to the AP.
            let mut tails: Vec<usize> = Vec::new(); // U_r without the AP
            for p in &paths {
                ops += 1;
                let last = *p.last().unwrap();
                if p.len() - 1 < h_max && !relayed[last] {
                    tails.push(last);
                }
            }
            for &u in &uncovered {
                let best = tails
                    .iter()
                    .chain(std::iter::once(&ap))
                    .inspect(|_| ops += 1)
                    .filter(|&&v| !relayed[v])
                    .max_by_key(|&&v| (rates.rate(v, u), std::cmp::Reverse(v)))
                    .copied()
                    .expect("the AP is always eligible");
                if best == ap {
                    paths.push(vec![ap, u]);
                } else {
                    let p = paths
                        .iter_mut()
                        .find(|p| *p.last().unwrap() == best)
                        .unwrap();
                    p.push(u);
                    relayed[best] = true;
                }
                selected[u] = true;
                batch.push(u);
            }
        }

        covered.extend(batch.iter().copied());
        uncovered.retain(|u| !batch.contains(u));
    }

    (PathSet { paths }, ops)
}
