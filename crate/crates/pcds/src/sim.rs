//! Frame-based slot-level simulation.
//!
//! Each frame runs a scheduling phase (demand collection, computation,
//! schedule push) followed by a transmission phase of pairings. Packets
//! pending at a frame boundary form that frame's common demand; deliveries
//! past the delay threshold count as discarded, and deliveries past the
//! horizon stay pending.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{fdmach_schedule, sbts_schedule};
use crate::model::{pairing_feasible, InterferenceMode, Link, RadioParams, RateMatrix, Topology};
use crate::path_select::select_paths;
use crate::schedule::{schedule, ScheduleError};
use crate::traffic::{arrivals, ArrivalTrace, TrafficConfig};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Pcds,
    FdmacH,
    Sbts,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scheme::Pcds => "pcds",
            Scheme::FdmacH => "fdmac-h",
            Scheme::Sbts => "sbts",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub slot_us: f64,
    pub t_d_slots: u64,
    pub t_push_slots: u64,
    pub t_sch_slots: u64,
    pub delay_threshold_slots: f64,
    pub horizon_slots: u64,
    pub scheme: Scheme,
    pub h_max: usize,
    pub interference: InterferenceMode,
    pub seed: u64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            slot_us: 5.0,
            t_d_slots: 1,
            t_push_slots: 1,
            t_sch_slots: 2,
            delay_threshold_slots: 2.5e4,
            horizon_slots: 100_000,
            scheme: Scheme::Pcds,
            h_max: 4,
            interference: InterferenceMode::Off,
            seed: 0,
        }
    }
}

impl FrameConfig {
    pub fn slot_seconds(&self) -> f64 {
        self.slot_us * 1e-6
    }

    fn scheduling_overhead(&self) -> u64 {
        match self.scheme {
            Scheme::Sbts => self.t_d_slots,
            _ => self.t_d_slots + self.t_sch_slots + self.t_push_slots,
        }
    }
}

/// One packet copy delivered to one UE.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeliveryEvent {
    pub packet_arrival_slot: f64,
    pub delivery_slot: u64,
    pub ue: usize,
    pub via_tx: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub avg_delay_slots: f64,
    pub throughput_packets: u64,
    pub d2d_ratio: f64,
    pub discarded_packets: u64,
    pub arrivals: u64,
    pub pending_packets: u64,
}

/// Aggregate the event log into the three evaluation metrics plus the
/// conservation counters. Events after the horizon are pending, events over
/// the delay threshold are discarded.
pub fn compute_metrics(
    events: &[DeliveryEvent],
    ap: usize,
    threshold_slots: f64,
    horizon_slots: u64,
    arrivals: u64,
    n_ues: usize,
) -> Metrics {
    let mut delivered = 0u64;
    let mut discarded = 0u64;
    let mut d2d = 0u64;
    let mut delay_sum = 0.0f64;
    for ev in events {
        if ev.delivery_slot > horizon_slots {
            continue; // pending at horizon
        }
        let delay = ev.delivery_slot as f64 - ev.packet_arrival_slot;
        if delay > threshold_slots {
            discarded += 1;
            continue;
        }
        delivered += 1;
        delay_sum += delay;
        if ev.via_tx != ap {
            d2d += 1;
        }
    }
    let expected = arrivals * n_ues as u64;
    Metrics {
        avg_delay_slots: if delivered > 0 { delay_sum / delivered as f64 } else { 0.0 },
        throughput_packets: delivered,
        d2d_ratio: if delivered > 0 { d2d as f64 / delivered as f64 } else { 0.0 },
        discarded_packets: discarded,
        arrivals,
        pending_packets: expected - delivered - discarded,
    }
}

/// Run the frame loop over a prepared arrival trace and return the raw event
/// log. Separated from [`run_simulation`] so tests can inject traces.
pub fn simulate_trace(
    topo: &Topology,
    rates: &RateMatrix,
    params: &RadioParams,
    trace: &ArrivalTrace,
    cfg: &FrameConfig,
) -> Result<Vec<DeliveryEvent>, SimError> {
    let mode = cfg.interference;
    let feasible = |links: &[Link]| pairing_feasible(params, links, rates, topo, mode);

    let mut events = Vec::new();
    let mut slot: u64 = 0;
    let mut next_arrival = 0usize;
    let mut batch: Vec<f64> = Vec::new();

    while slot < cfg.horizon_slots {
        while next_arrival < trace.timestamps_slots.len()
            && trace.timestamps_slots[next_arrival] <= slot as f64
        {
            batch.push(trace.timestamps_slots[next_arrival]);
            next_arrival += 1;
        }
        if batch.is_empty() {
            slot += 1;
            continue;
        }
        let d = batch.len() as u64;

        let sched = match cfg.scheme {
            Scheme::Pcds => {
                let paths = select_paths(rates, topo, cfg.h_max);
                schedule(&paths, rates, d, &feasible)?
            }
            Scheme::FdmacH => {
                let paths = select_paths(rates, topo, cfg.h_max);
                fdmach_schedule(&paths, rates, d, &feasible)?
            }
            Scheme::Sbts => sbts_schedule(rates, topo, d)?,
        };

        let transmission_start = slot + cfg.scheduling_overhead();
        let mut elapsed = 0u64;
        for pairing in &sched.pairings {
            elapsed += pairing.slots;
            let delivery_slot = transmission_start + elapsed;
            for link in &pairing.links {
                for &arrival_slot in &batch {
                    events.push(DeliveryEvent {
                        packet_arrival_slot: arrival_slot,
                        delivery_slot,
                        ue: link.rx,
                        via_tx: link.tx,
                    });
                }
            }
        }
        slot = transmission_start + elapsed;
        batch.clear();
    }
    Ok(events)
}

/// Full simulation run: generate the arrival trace for the configured traffic
/// mode and seed, drive the frame loop, and aggregate the metrics.
pub fn run_simulation(
    topo: &Topology,
    rates: &RateMatrix,
    params: &RadioParams,
    traffic_cfg: &TrafficConfig,
    cfg: &FrameConfig,
) -> Result<Metrics, SimError> {
    let trace = arrivals(traffic_cfg, cfg.horizon_slots, cfg.slot_seconds(), cfg.seed);
    let events = simulate_trace(topo, rates, params, &trace, cfg)?;
    Ok(compute_metrics(
        &events,
        topo.ap(),
        cfg.delay_threshold_slots,
        cfg.horizon_slots,
        trace.timestamps_slots.len() as u64,
        topo.ues().len(),
    ))
}
