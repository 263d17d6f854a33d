//! Scheduling library and discrete-time-slot simulator for popular content
//! downloading in directional 60 GHz small cells.
//!
//! The library couples a rate-greedy multi-hop path selector with a greedy
//! concurrent transmission scheduler, an exact branch-and-bound oracle backed
//! by an RLT-linearized MILP export, two baseline schemes (serial
//! broadcasting and frontier edge coloring), Poisson/IPP traffic generators,
//! and a frame-based simulation harness with experiment orchestration.

pub mod baselines;
pub mod experiment;
pub mod fixture;
pub mod milp;
pub mod model;
pub mod path_select;
pub mod schedule;
pub mod sim;
pub mod traffic;

pub use model::{InterferenceMode, Link, RadioParams, RateMatrix, Topology};
pub use path_select::{max_hops_bound, select_paths, PathSet};
pub use schedule::{hop_weight, schedule, validate_schedule, Pairing, Schedule};
pub use sim::{run_simulation, FrameConfig, Metrics, Scheme};
