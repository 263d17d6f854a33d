use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pcds::experiment::{
    export_fixture, run_experiment, summarize, write_csv, SimConfig,
};
use pcds::milp::{build_milp, default_k, export_milp, solve_exact, SinrConstraints};
use pcds::model::{pairing_feasible, InterferenceMode, RateMatrix};
use pcds::path_select::select_paths;
use pcds::schedule::schedule;
use pcds::sim::Scheme;

#[derive(Parser)]
#[command(name = "pcds", about = "Popular content downloading scheduler and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment sweep described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary path (means and 95% CI half-widths).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Restrict to one scheme.
        #[arg(long)]
        scheme: Option<Scheme>,
        /// Restrict to one h_max.
        #[arg(long)]
        hmax: Option<usize>,
        /// Restrict to one load point.
        #[arg(long)]
        load: Option<f64>,
        /// Interference handling: off or sinr.
        #[arg(long)]
        interference: Option<InterferenceMode>,
    },
    /// One-shot: schedule a rate-matrix file and dump the result.
    Schedule {
        /// JSON rate matrix file; the last row/column is the AP.
        #[arg(long)]
        rates: PathBuf,
        #[arg(long, default_value_t = 4)]
        hmax: usize,
        /// Demand in packets.
        #[arg(long, default_value_t = 6)]
        demand: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// MILP oracle operations.
    Milp {
        #[command(subcommand)]
        command: MilpCommand,
    },
    /// Write the golden files of a named fixture.
    Fixture {
        name: String,
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MilpCommand {
    /// Export the LP-format text of an instance.
    Export {
        #[arg(long)]
        rates: PathBuf,
        #[arg(long, default_value_t = 4)]
        hmax: usize,
        #[arg(long, default_value_t = 6)]
        demand: u64,
        #[arg(long)]
        interference: Option<InterferenceMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance exactly with the branch-and-bound oracle.
    Solve {
        #[arg(long)]
        rates: PathBuf,
        #[arg(long, default_value_t = 4)]
        hmax: usize,
        #[arg(long, default_value_t = 6)]
        demand: u64,
        /// Search-node budget before giving up on the optimality proof.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Load a rate matrix and synthesize a nominal topology around it: node count
/// from the matrix, last node is the AP. Positions are placeholders, which is
/// fine for adjacency-only scheduling.
fn load_rates(path: &PathBuf) -> Result<(RateMatrix, pcds::Topology), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let rates: RateMatrix = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let n = rates.n();
    if n < 2 {
        return Err("rate matrix needs at least 2 nodes".into());
    }
    let side = 100.0;
    let nodes = (0..n)
        .map(|id| pcds::model::Node {
            id,
            position: pcds::model::Point {
                x: (id as f64 + 1.0) * side / (n as f64 + 1.0),
                y: side / 2.0,
            },
            is_ap: id == n - 1,
        })
        .collect();
    let topo = pcds::Topology::new(nodes, (side, side)).map_err(|e| e.to_string())?;
    Ok((rates, topo))
}

fn write_or_print(out: Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| e.to_string()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            config,
            out,
            summary,
            seed,
            scheme,
            hmax,
            load,
            interference,
        } => {
            let mut cfg = SimConfig::from_file(&config).map_err(|e| e.to_string())?;
            if let Some(s) = seed {
                cfg.experiment.base_seed = s;
            }
            if let Some(s) = scheme {
                cfg.experiment.schemes = vec![s];
            }
            if let Some(h) = hmax {
                cfg.experiment.h_max = vec![h];
            }
            if let Some(l) = load {
                cfg.experiment.loads = vec![l];
            }
            if let Some(m) = interference {
                cfg.frame.interference = m;
            }
            let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
            write_or_print(out, &String::from_utf8(csv).unwrap())?;
            if let Some(path) = summary {
                let cells = summarize(&rows);
                let json = serde_json::to_string_pretty(&cells).map_err(|e| e.to_string())?;
                std::fs::write(path, json + "\n").map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        Command::Schedule { rates, hmax, demand, out } => {
            let (rates, topo) = load_rates(&rates)?;
            let paths = select_paths(&rates, &topo, hmax);
            let sched = schedule(&paths, &rates, demand, &|_: &[_]| true)
                .map_err(|e| e.to_string())?;
            let dump = serde_json::json!({
                "paths": paths,
                "schedule": sched,
                "total_slots": sched.total_slots(),
            });
            write_or_print(out, &(serde_json::to_string_pretty(&dump).unwrap() + "\n"))
        }
        Command::Milp { command } => match command {
            MilpCommand::Export { rates, hmax, demand, interference, out } => {
                let (rates, topo) = load_rates(&rates)?;
                let paths = select_paths(&rates, &topo, hmax);
                let params = pcds::RadioParams::default();
                let k = default_k(&paths, topo.ues().len());
                let sinr = match interference.unwrap_or(InterferenceMode::Off) {
                    InterferenceMode::Off => SinrConstraints::Off,
                    InterferenceMode::Sinr => SinrConstraints::On,
                };
                let instance = build_milp(&paths, &rates, demand, &params, &topo, k, sinr)
                    .map_err(|e| e.to_string())?;
                write_or_print(out, &export_milp(&instance))
            }
            MilpCommand::Solve { rates, hmax, demand, budget, out } => {
                let (rates, topo) = load_rates(&rates)?;
                let paths = select_paths(&rates, &topo, hmax);
                let params = pcds::RadioParams::default();
                let feasible = |links: &[pcds::Link]| {
                    pairing_feasible(&params, links, &rates, &topo, InterferenceMode::Off)
                };
                let solution = solve_exact(&paths, &rates, demand, &feasible, budget)
                    .map_err(|e| e.to_string())?;
                write_or_print(
                    out,
                    &(serde_json::to_string_pretty(&solution).unwrap() + "\n"),
                )
            }
        },
        Command::Fixture { name, out } => {
            let written = export_fixture(&name, &out).map_err(|e| e.to_string())?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
