//! Geometry, link budget, interference, and SINR feasibility.
//!
//! Everything the schedulers consult about the physical layer lives here:
//! node positions, the distance-based path loss model, mutual interference
//! between concurrent directional links, and the per-rate SINR thresholds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("node {0} does not exist (n = {1})")]
    UnknownNode(usize, usize),
    #[error("nodes {0} and {1} are co-located; link distance is zero")]
    ZeroDistance(usize, usize),
    #[error("links ({0},{1}) and ({2},{3}) are adjacent and cannot be concurrent")]
    AdjacentLinks(usize, usize, usize, usize),
    #[error("link {0}->{1} has rate zero (unreachable)")]
    ZeroRate(usize, usize),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
}

/// A directed transmission link from `tx` to `rx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub tx: usize,
    pub rx: usize,
}

impl Link {
    pub fn new(tx: usize, rx: usize) -> Self {
        assert_ne!(tx, rx, "link endpoints must differ");
        Link { tx, rx }
    }

    /// Two links are adjacent when they share an endpoint.
    pub fn adjacent(&self, other: &Link) -> bool {
        self.tx == other.tx || self.tx == other.rx || self.rx == other.tx || self.rx == other.rx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub position: Point,
    pub is_ap: bool,
}

/// Node layout of one small cell: positions plus the AP designation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Topology {
    nodes: Vec<Node>,
    area: (f64, f64),
    ap: usize,
}

impl Topology {
    pub fn new(nodes: Vec<Node>, area: (f64, f64)) -> Result<Self, ModelError> {
        if nodes.len() < 2 {
            return Err(ModelError::InvalidTopology(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(ModelError::InvalidTopology(format!(
                    "node ids must be dense 0..n-1; index {} has id {}",
                    i, node.id
                )));
            }
            let p = node.position;
            if p.x < 0.0 || p.y < 0.0 || p.x > area.0 || p.y > area.1 {
                return Err(ModelError::InvalidTopology(format!(
                    "node {} at ({}, {}) outside area {}x{}",
                    i, p.x, p.y, area.0, area.1
                )));
            }
        }
        let aps: Vec<usize> = nodes.iter().filter(|n| n.is_ap).map(|n| n.id).collect();
        if aps.len() != 1 {
            return Err(ModelError::InvalidTopology(format!(
                "exactly one AP required, found {}",
                aps.len()
            )));
        }
        Ok(Topology { ap: aps[0], nodes, area })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn ap(&self) -> usize {
        self.ap
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn area(&self) -> (f64, f64) {
        self.area
    }

    /// Ids of all non-AP nodes, ascending.
    pub fn ues(&self) -> Vec<usize> {
        self.nodes.iter().filter(|n| !n.is_ap).map(|n| n.id).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64, ModelError> {
        let n = self.nodes.len();
        let a = self.nodes.get(i).ok_or(ModelError::UnknownNode(i, n))?;
        let b = self.nodes.get(j).ok_or(ModelError::UnknownNode(j, n))?;
        Ok(a.position.distance(&b.position))
    }
}

/// Link budget parameters and the rate -> minimum-SINR table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioParams {
    pub tx_power_mw: f64,
    pub k0: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub path_loss_exp: f64,
    pub mui_factor: f64,
    pub noise_psd_mw_per_hz: f64,
    pub bandwidth_hz: f64,
    /// Minimum SINR (dimensionless ratio) to sustain each rate in packets/slot.
    pub sinr_thresholds: BTreeMap<u32, f64>,
}

impl Default for RadioParams {
    fn default() -> Self {
        let mut sinr_thresholds = BTreeMap::new();
        sinr_thresholds.insert(1, 4.0);
        sinr_thresholds.insert(2, 16.0);
        sinr_thresholds.insert(3, 36.0);
        RadioParams {
            tx_power_mw: 1000.0,
            // (lambda / 4 pi)^2 at 60 GHz, lambda = 5 mm
            k0: 1.583e-7,
            tx_gain: 1.0,
            rx_gain: 1.0,
            path_loss_exp: 2.17,
            mui_factor: 0.01,
            // thermal noise floor, -174 dBm/Hz
            noise_psd_mw_per_hz: 3.981e-18,
            bandwidth_hz: 2.16e9,
            sinr_thresholds,
        }
    }
}

impl RadioParams {
    /// Antenna gain of `tx` toward `rx`. Constant by default; the node pair is
    /// part of the interface so direction-dependent beam patterns can slot in.
    pub fn gain_product(&self, _tx: usize, _rx: usize) -> f64 {
        self.tx_gain * self.rx_gain
    }

    pub fn noise_mw(&self) -> f64 {
        self.noise_psd_mw_per_hz * self.bandwidth_hz
    }

    pub fn sinr_threshold(&self, rate: u32) -> f64 {
        self.sinr_thresholds
            .get(&rate)
            .copied()
            .unwrap_or_else(|| self.sinr_thresholds.values().last().copied().unwrap_or(0.0))
    }
}

/// Per-directed-link transmission rates in packets per slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateMatrix {
    n: usize,
    c: Vec<Vec<u32>>,
}

impl RateMatrix {
    pub fn new(c: Vec<Vec<u32>>) -> Result<Self, ModelError> {
        let n = c.len();
        for (i, row) in c.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::InvalidTopology(format!(
                    "rate matrix row {} has length {}, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
            if row[i] != 0 {
                return Err(ModelError::InvalidTopology(format!(
                    "rate matrix diagonal entry ({i},{i}) must be zero"
                )));
            }
        }
        Ok(RateMatrix { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self, i: usize, j: usize) -> u32 {
        self.c[i][j]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.c
    }
}

/// Distance band -> rate mapping used to derive a rate matrix from geometry.
/// Thresholds are upper band edges, strictly increasing; rates strictly
/// decreasing with distance. Distances past the last threshold get the last rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistRateMap {
    pub thresholds_m: Vec<f64>,
    pub rates: Vec<u32>,
}

impl Default for DistRateMap {
    fn default() -> Self {
        // equal-width bands over the 10 m x 10 m diagonal
        let diag = (200.0f64).sqrt();
        DistRateMap {
            thresholds_m: vec![diag / 3.0, 2.0 * diag / 3.0],
            rates: vec![3, 2, 1],
        }
    }
}

impl DistRateMap {
    pub fn rate_for(&self, distance: f64) -> u32 {
        for (t, &r) in self.thresholds_m.iter().zip(&self.rates) {
            if distance < *t {
                return r;
            }
        }
        *self.rates.last().expect("nonempty rate list")
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.rates.len() != self.thresholds_m.len() + 1 {
            return Err(ModelError::InvalidTopology(
                "distance map needs one more rate than thresholds".into(),
            ));
        }
        if !self.thresholds_m.windows(2).all(|w| w[0] < w[1]) {
            return Err(ModelError::InvalidTopology(
                "distance thresholds must be strictly increasing".into(),
            ));
        }
        if !self.rates.windows(2).all(|w| w[0] > w[1]) {
            return Err(ModelError::InvalidTopology(
                "rates must be strictly decreasing with distance".into(),
            ));
        }
        Ok(())
    }
}

/// Received power at the link receiver under the path loss model.
pub fn received_power(params: &RadioParams, link: Link, topo: &Topology) -> Result<f64, ModelError> {
    let l = topo.distance(link.tx, link.rx)?;
    if l <= 0.0 {
        return Err(ModelError::ZeroDistance(link.tx, link.rx));
    }
    Ok(params.k0
        * params.gain_product(link.tx, link.rx)
        * l.powf(-params.path_loss_exp)
        * params.tx_power_mw)
}

/// Aggregate interference power at the victim receiver from a set of
/// concurrent links. The set must not contain links adjacent to the victim.
pub fn interference_power(
    params: &RadioParams,
    victim: Link,
    concurrent: &[Link],
    topo: &Topology,
) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for other in concurrent {
        if victim.adjacent(other) {
            return Err(ModelError::AdjacentLinks(
                victim.tx, victim.rx, other.tx, other.rx,
            ));
        }
        let l = topo.distance(other.tx, victim.rx)?;
        if l <= 0.0 {
            return Err(ModelError::ZeroDistance(other.tx, victim.rx));
        }
        total += params.k0
            * params.gain_product(other.tx, victim.rx)
            * l.powf(-params.path_loss_exp)
            * params.tx_power_mw;
    }
    Ok(params.mui_factor * total)
}

/// SINR at the link receiver given a set of concurrent interfering links.
pub fn sinr(
    params: &RadioParams,
    link: Link,
    concurrent: &[Link],
    topo: &Topology,
) -> Result<f64, ModelError> {
    let signal = received_power(params, link, topo)?;
    let interference = interference_power(params, link, concurrent, topo)?;
    Ok(signal / (params.noise_mw() + interference))
}

/// Whether to check per-link SINR thresholds when judging a pairing, or rely
/// on adjacency alone (the simulation default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InterferenceMode {
    Off,
    Sinr,
}

/// True iff the links can transmit concurrently: always a matching, and with
/// SINR mode on, every link's SINR must meet the threshold for its rate.
pub fn pairing_feasible(
    params: &RadioParams,
    pairing: &[Link],
    rates: &RateMatrix,
    topo: &Topology,
    mode: InterferenceMode,
) -> bool {
    for (i, a) in pairing.iter().enumerate() {
        for b in &pairing[i + 1..] {
            if a.adjacent(b) {
                return false;
            }
        }
    }
    if mode == InterferenceMode::Off {
        return true;
    }
    for (i, link) in pairing.iter().enumerate() {
        let others: Vec<Link> = pairing
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, l)| *l)
            .collect();
        match sinr(params, *link, &others, topo) {
            Ok(g) => {
                if g < params.sinr_threshold(rates.rate(link.tx, link.rx)) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// Derive the rate matrix from pairwise distances through the band map.
pub fn rate_matrix_from_topology(topo: &Topology, map: &DistRateMap) -> RateMatrix {
    let n = topo.n();
    let mut c = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = topo.distance(i, j).expect("valid ids");
                c[i][j] = map.rate_for(d);
            }
        }
    }
    RateMatrix::new(c).expect("square with zero diagonal")
}
