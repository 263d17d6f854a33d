//! Experiment configuration, sweep orchestration, and result emission.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    rate_matrix_from_topology, DistRateMap, InterferenceMode, Node, Point, RadioParams,
    RateMatrix, Topology,
};
use crate::sim::{run_simulation, FrameConfig, Metrics, Scheme};
use crate::traffic::{TrafficConfig, TrafficMode};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config field `{0}`: {1}")]
    Invalid(&'static str, String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("simulation cell failed (scheme {scheme}, load {load}, seed {seed}): {message}")]
    Cell {
        scheme: Scheme,
        load: f64,
        seed: u64,
        message: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologySection {
    /// "random" places UEs uniformly with the AP centered; "explicit" reads
    /// `coordinates` (last entry is the AP).
    pub source: String,
    pub area: (f64, f64),
    pub n_ues: usize,
    pub coordinates: Option<Vec<(f64, f64)>>,
    pub dist_rate_map: DistRateMap,
}

impl Default for TopologySection {
    fn default() -> Self {
        TopologySection {
            source: "random".into(),
            area: (10.0, 10.0),
            n_ues: 10,
            coordinates: None,
            dist_rate_map: DistRateMap::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSection {
    pub schemes: Vec<Scheme>,
    pub loads: Vec<f64>,
    pub h_max: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            schemes: vec![Scheme::Sbts, Scheme::FdmacH, Scheme::Pcds],
            loads: vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0],
            h_max: vec![4],
            replications: 5,
            base_seed: 1,
        }
    }
}

/// The single config surface: topology, radio, traffic, frame, experiment.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub topology: TopologySection,
    pub radio: RadioParams,
    pub traffic: TrafficConfig,
    pub frame: FrameConfig,
    pub experiment: ExperimentSection,
}

impl SimConfig {
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SimConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.experiment.schemes.is_empty() {
            return Err(ExperimentError::Invalid("experiment.schemes", "empty".into()));
        }
        if self.experiment.loads.is_empty() {
            return Err(ExperimentError::Invalid("experiment.loads", "empty".into()));
        }
        if self.experiment.h_max.is_empty() {
            return Err(ExperimentError::Invalid("experiment.h_max", "empty".into()));
        }
        if self.experiment.replications == 0 {
            return Err(ExperimentError::Invalid(
                "experiment.replications",
                "must be at least 1".into(),
            ));
        }
        if self.topology.source != "random" && self.topology.source != "explicit" {
            return Err(ExperimentError::Invalid(
                "topology.source",
                format!("`{}` is neither `random` nor `explicit`", self.topology.source),
            ));
        }
        if self.topology.source == "explicit" && self.topology.coordinates.is_none() {
            return Err(ExperimentError::Invalid(
                "topology.coordinates",
                "required with source = explicit".into(),
            ));
        }
        self.topology
            .dist_rate_map
            .validate()
            .map_err(|e| ExperimentError::Invalid("topology.dist_rate_map", e.to_string()))?;
        self.traffic
            .validate()
            .map_err(|e| ExperimentError::Invalid("traffic", e.to_string()))?;
        Ok(())
    }
}

/// Uniform random UE placement with the AP centered. UEs landing on the AP
/// are resampled.
pub fn random_topology(n_ues: usize, area: (f64, f64), seed: u64) -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ap_pos = Point { x: area.0 / 2.0, y: area.1 / 2.0 };
    let mut nodes = Vec::with_capacity(n_ues + 1);
    for id in 0..n_ues {
        let position = loop {
            let p = Point {
                x: rng.gen::<f64>() * area.0,
                y: rng.gen::<f64>() * area.1,
            };
            if p.distance(&ap_pos) > 1e-6
                && nodes
                    .iter()
                    .all(|n: &Node| n.position.distance(&p) > 1e-6)
            {
                break p;
            }
        };
        nodes.push(Node { id, position, is_ap: false });
    }
    nodes.push(Node { id: n_ues, position: ap_pos, is_ap: true });
    Topology::new(nodes, area).expect("generated topology is valid")
}

fn build_topology(section: &TopologySection, seed: u64) -> Result<Topology, ExperimentError> {
    match section.source.as_str() {
        "random" => Ok(random_topology(section.n_ues, section.area, seed)),
        _ => {
            let coords = section
                .coordinates
                .as_ref()
                .ok_or_else(|| {
                    ExperimentError::Invalid("topology.coordinates", "missing".into())
                })?;
            let n = coords.len();
            let nodes = coords
                .iter()
                .enumerate()
                .map(|(id, &(x, y))| Node {
                    id,
                    position: Point { x, y },
                    is_ap: id == n - 1,
                })
                .collect();
            Topology::new(nodes, section.area)
                .map_err(|e| ExperimentError::Invalid("topology.coordinates", e.to_string()))
        }
    }
}

/// One sweep-cell result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub traffic_mode: TrafficMode,
    pub load: f64,
    pub h_max: usize,
    pub seed: u64,
    pub metrics: Metrics,
}

pub const CSV_HEADER: &str =
    "scheme,traffic_mode,load,h_max,seed,avg_delay_slots,throughput_packets,d2d_ratio,discarded_packets";

/// Run the full (scheme x load x h_max x replication) sweep. Replications run
/// in parallel; rows come back in deterministic sweep order.
pub fn run_experiment(cfg: &SimConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &scheme in &cfg.experiment.schemes {
        for &load in &cfg.experiment.loads {
            for &h_max in &cfg.experiment.h_max {
                for rep in 0..cfg.experiment.replications {
                    cells.push((scheme, load, h_max, cfg.experiment.base_seed + rep as u64));
                }
            }
        }
    }

    let rows: Vec<Result<ResultRow, ExperimentError>> = cells
        .par_iter()
        .map(|&(scheme, load, h_max, seed)| {
            let topo = build_topology(&cfg.topology, seed)?;
            let rates = rate_matrix_from_topology(&topo, &cfg.topology.dist_rate_map);
            let traffic = TrafficConfig {
                n_ues: topo.ues().len(),
                ..cfg.traffic.clone()
            }
            .with_load(load);
            let frame = FrameConfig { scheme, h_max, seed, ..cfg.frame.clone() };
            let metrics = run_simulation(&topo, &rates, &cfg.radio, &traffic, &frame)
                .map_err(|e| ExperimentError::Cell {
                    scheme,
                    load,
                    seed,
                    message: e.to_string(),
                })?;
            Ok(ResultRow {
                scheme,
                traffic_mode: traffic.mode,
                load,
                h_max,
                seed,
                metrics,
            })
        })
        .collect();
    rows.into_iter().collect()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<(), ExperimentError> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.scheme,
            match r.traffic_mode {
                TrafficMode::Poisson => "poisson",
                TrafficMode::Ipp => "ipp",
            },
            r.load,
            r.h_max,
            r.seed,
            r.metrics.avg_delay_slots,
            r.metrics.throughput_packets,
            r.metrics.d2d_ratio,
            r.metrics.discarded_packets
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryCell {
    pub scheme: Scheme,
    pub traffic_mode: TrafficMode,
    pub load: f64,
    pub h_max: usize,
    pub replications: usize,
    pub mean_delay_slots: f64,
    pub delay_ci95_half_width: f64,
    pub mean_throughput_packets: f64,
    pub throughput_ci95_half_width: f64,
    pub mean_d2d_ratio: f64,
}

/// Mean and normal-approximation 95% confidence half-width.
pub fn mean_ci95(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

/// Collapse replications into per-cell means with confidence half-widths.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryCell> {
    let mut groups: Vec<((Scheme, TrafficMode, u64, usize), Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        let key = (row.scheme, row.traffic_mode, row.load.to_bits(), row.h_max);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|((scheme, traffic_mode, load_bits, h_max), rows)| {
            let delays: Vec<f64> = rows.iter().map(|r| r.metrics.avg_delay_slots).collect();
            let tput: Vec<f64> = rows
                .iter()
                .map(|r| r.metrics.throughput_packets as f64)
                .collect();
            let d2d: Vec<f64> = rows.iter().map(|r| r.metrics.d2d_ratio).collect();
            let (md, hd) = mean_ci95(&delays);
            let (mt, ht) = mean_ci95(&tput);
            let (m2, _) = mean_ci95(&d2d);
            SummaryCell {
                scheme,
                traffic_mode,
                load: f64::from_bits(load_bits),
                h_max,
                replications: rows.len(),
                mean_delay_slots: md,
                delay_ci95_half_width: hd,
                mean_throughput_packets: mt,
                throughput_ci95_half_width: ht,
                mean_d2d_ratio: m2,
            }
        })
        .collect()
}

/// Write the golden fixture files for a named example cell.
pub fn export_fixture(name: &str, dir: &Path) -> Result<Vec<std::path::PathBuf>, ExperimentError> {
    if name != "six-ue" {
        return Err(ExperimentError::UnknownFixture(name.into()));
    }
    std::fs::create_dir_all(dir)?;
    let (rates, topo) = crate::fixture::six_ue();
    let mut written = Vec::new();

    let mut write = |file: &str, json: String| -> Result<(), ExperimentError> {
        let path = dir.join(file);
        std::fs::write(&path, json + "\n")?;
        written.push(path);
        Ok(())
    };
    write("rates.json", serde_json::to_string_pretty(&rates)?)?;
    write("topology.json", serde_json::to_string_pretty(&topo)?)?;
    write(
        "expected_paths.json",
        serde_json::to_string_pretty(&crate::fixture::six_ue_paths())?,
    )?;
    write(
        "expected_schedule.json",
        serde_json::to_string_pretty(&crate::fixture::six_ue_schedule())?,
    )?;
    Ok(written)
}

/// Shared helper for tests and the CLI: a random small-cell instance with its
/// derived rate matrix.
pub fn random_instance(n_ues: usize, seed: u64) -> (Topology, RateMatrix) {
    let topo = random_topology(n_ues, (10.0, 10.0), seed);
    let rates = rate_matrix_from_topology(&topo, &DistRateMap::default());
    (topo, rates)
}

/// Frame feasibility closure for a given interference mode.
pub fn feasibility_closure<'a>(
    params: &'a RadioParams,
    rates: &'a RateMatrix,
    topo: &'a Topology,
    mode: InterferenceMode,
) -> impl Fn(&[crate::model::Link]) -> bool + 'a {
    move |links| crate::model::pairing_feasible(params, links, rates, topo, mode)
}
