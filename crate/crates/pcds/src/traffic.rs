//! Arrival process generators and traffic load accounting.
//!
//! Two modes: a plain Poisson process, and an interrupted Poisson process
//! realized through i.i.d. second-order hyper-exponential inter-arrivals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("invalid traffic config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficMode {
    Poisson,
    Ipp,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrafficConfig {
    pub mode: TrafficMode,
    /// L, bits per packet.
    pub packet_size_bits: f64,
    /// R, reference rate in bit/s.
    pub rate_ref_bps: f64,
    pub n_ues: usize,
    /// Poisson arrival rate, packets per second.
    pub lambda: f64,
    /// IPP mixture rates and probabilities.
    pub lambda1: f64,
    pub lambda2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            mode: TrafficMode::Poisson,
            packet_size_bits: 8000.0,
            rate_ref_bps: 2e9,
            n_ues: 10,
            lambda: 25_000.0,
            // not stated in the source setup; exposed through config
            lambda1: 250_000.0,
            lambda2: 25_000.0,
            p1: 0.5,
            p2: 0.5,
        }
    }
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<(), TrafficError> {
        if self.packet_size_bits <= 0.0 || self.rate_ref_bps <= 0.0 {
            return Err(TrafficError::Invalid("L and R must be positive".into()));
        }
        if self.lambda <= 0.0 || self.lambda1 <= 0.0 || self.lambda2 <= 0.0 {
            return Err(TrafficError::Invalid("arrival rates must be positive".into()));
        }
        if self.p1 < 0.0 || self.p2 < 0.0 || (self.p1 + self.p2 - 1.0).abs() > 1e-9 {
            return Err(TrafficError::Invalid("p1 + p2 must equal 1".into()));
        }
        if self.n_ues == 0 {
            return Err(TrafficError::Invalid("need at least one UE".into()));
        }
        Ok(())
    }

    /// Mean inter-arrival time of the hyper-exponential mixture, seconds.
    pub fn ipp_mean_interarrival(&self) -> f64 {
        self.p1 / self.lambda1 + self.p2 / self.lambda2
    }

    /// Scale the arrival rate (or mixture mean) so the offered load matches
    /// `load`, keeping the lambda1/lambda2 ratio and probabilities fixed.
    pub fn with_load(mut self, load: f64) -> Self {
        match self.mode {
            TrafficMode::Poisson => {
                self.lambda = load * self.rate_ref_bps / (self.packet_size_bits * self.n_ues as f64);
            }
            TrafficMode::Ipp => {
                let target_mean = self.packet_size_bits * self.n_ues as f64
                    / (load * self.rate_ref_bps);
                let scale = self.ipp_mean_interarrival() / target_mean;
                self.lambda1 *= scale;
                self.lambda2 *= scale;
            }
        }
        self
    }
}

/// Offered load: packet workload across all UEs relative to the reference rate.
pub fn traffic_load(cfg: &TrafficConfig) -> f64 {
    match cfg.mode {
        TrafficMode::Poisson => {
            cfg.lambda * cfg.packet_size_bits * cfg.n_ues as f64 / cfg.rate_ref_bps
        }
        TrafficMode::Ipp => {
            cfg.packet_size_bits * cfg.n_ues as f64
                / (cfg.ipp_mean_interarrival() * cfg.rate_ref_bps)
        }
    }
}

/// Monotone arrival timestamps in slot units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalTrace {
    pub timestamps_slots: Vec<f64>,
}

fn trace_from_interarrivals(
    horizon_slots: u64,
    slot_seconds: f64,
    mut next_gap_s: impl FnMut() -> f64,
) -> ArrivalTrace {
    let horizon_s = horizon_slots as f64 * slot_seconds;
    let mut t = 0.0;
    let mut timestamps = Vec::new();
    loop {
        t += next_gap_s();
        if t > horizon_s {
            break;
        }
        timestamps.push(t / slot_seconds);
    }
    ArrivalTrace { timestamps_slots: timestamps }
}

/// Poisson arrivals over the horizon, deterministic per seed.
pub fn poisson_arrivals(
    cfg: &TrafficConfig,
    horizon_slots: u64,
    slot_seconds: f64,
    seed: u64,
) -> ArrivalTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(cfg.lambda).expect("positive rate");
    trace_from_interarrivals(horizon_slots, slot_seconds, || exp.sample(&mut rng))
}

/// IPP arrivals: each inter-arrival is exponential(lambda1) with probability
/// p1, else exponential(lambda2).
pub fn ipp_arrivals(
    cfg: &TrafficConfig,
    horizon_slots: u64,
    slot_seconds: f64,
    seed: u64,
) -> ArrivalTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e1 = Exp::new(cfg.lambda1).expect("positive rate");
    let e2 = Exp::new(cfg.lambda2).expect("positive rate");
    trace_from_interarrivals(horizon_slots, slot_seconds, || {
        if rng.gen::<f64>() < cfg.p1 {
            e1.sample(&mut rng)
        } else {
            e2.sample(&mut rng)
        }
    })
}

/// Generate arrivals for the configured mode.
pub fn arrivals(
    cfg: &TrafficConfig,
    horizon_slots: u64,
    slot_seconds: f64,
    seed: u64,
) -> ArrivalTrace {
    match cfg.mode {
        TrafficMode::Poisson => poisson_arrivals(cfg, horizon_slots, slot_seconds, seed),
        TrafficMode::Ipp => ipp_arrivals(cfg, horizon_slots, slot_seconds, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_formulas() {
        let cfg = TrafficConfig {
            mode: TrafficMode::Poisson,
            lambda: 25_000.0,
            packet_size_bits: 8000.0,
            n_ues: 10,
            rate_ref_bps: 2e9,
            ..TrafficConfig::default()
        };
        assert!((traffic_load(&cfg) - 1.0).abs() < 1e-12);

        // degenerate mixture collapses to Poisson
        let ipp = TrafficConfig {
            mode: TrafficMode::Ipp,
            lambda1: 25_000.0,
            lambda2: 1.0,
            p1: 1.0,
            p2: 0.0,
            ..cfg.clone()
        };
        assert!((traffic_load(&ipp) - 1.0).abs() < 1e-12);

        // p1 = p2 = 0.5, lambda1 = 2 lambda2 -> E(X) = 0.75 / lambda2
        let l2 = 10_000.0;
        let mix = TrafficConfig {
            mode: TrafficMode::Ipp,
            lambda1: 2.0 * l2,
            lambda2: l2,
            p1: 0.5,
            p2: 0.5,
            ..cfg
        };
        let expected = 8000.0 * 10.0 * l2 / (0.75 * 2e9);
        assert!((traffic_load(&mix) - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn with_load_inverts_the_formulas() {
        for mode in [TrafficMode::Poisson, TrafficMode::Ipp] {
            let cfg = TrafficConfig { mode, ..TrafficConfig::default() };
            for load in [0.5, 1.0, 3.33, 5.0] {
                let scaled = cfg.clone().with_load(load);
                assert!((traffic_load(&scaled) - load).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn traces_deterministic_and_sorted() {
        let cfg = TrafficConfig::default();
        let a = poisson_arrivals(&cfg, 10_000, 5e-6, 42);
        let b = poisson_arrivals(&cfg, 10_000, 5e-6, 42);
        assert_eq!(a, b);
        assert!(a.timestamps_slots.windows(2).all(|w| w[0] <= w[1]));
        assert!(a
            .timestamps_slots
            .iter()
            .all(|&t| t >= 0.0 && t <= 10_000.0));
        let c = poisson_arrivals(&cfg, 10_000, 5e-6, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn poisson_count_within_monte_carlo_bound() {
        // expected 10^4 arrivals; allow 3 sigma
        let cfg = TrafficConfig { lambda: 10_000.0, ..TrafficConfig::default() };
        let horizon_slots = 200_000; // 1 s at 5 us slots
        let trace = poisson_arrivals(&cfg, horizon_slots, 5e-6, 7);
        let n = trace.timestamps_slots.len() as f64;
        assert!((n - 1e4).abs() < 3.0 * 1e2, "count {n} outside bound");
    }

    #[test]
    fn empirical_means_match() {
        let cfg = TrafficConfig { lambda: 50_000.0, ..TrafficConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let exp = Exp::new(cfg.lambda).unwrap();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| exp.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0 / cfg.lambda).abs() / (1.0 / cfg.lambda) < 0.01);

        // hyper-exponential mean and burstiness
        let ipp = TrafficConfig {
            mode: TrafficMode::Ipp,
            lambda1: 250_000.0,
            lambda2: 25_000.0,
            p1: 0.5,
            p2: 0.5,
            ..TrafficConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let e1 = Exp::new(ipp.lambda1).unwrap();
        let e2 = Exp::new(ipp.lambda2).unwrap();
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen::<f64>() < ipp.p1 {
                    e1.sample(&mut rng)
                } else {
                    e2.sample(&mut rng)
                }
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ex = ipp.ipp_mean_interarrival();
        assert!((mean - ex).abs() / ex < 0.02);
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
        let scv = var / (mean * mean);
        assert!(scv > 1.0, "hyper-exponential SCV should exceed 1, got {scv}");
    }
}
