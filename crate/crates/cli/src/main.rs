//! `scss`: simulation and tomography pipelines for heralded squeezed cat
//! state generation, emitting plot-ready CSV/JSON with reproducibility
//! manifests.

mod commands;
mod manifest;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use commands::*;
use scss_core::Parity;

#[derive(Parser)]
#[command(name = "scss", version, about = "Squeezed cat state generation: simulation, sweeps, and homodyne tomography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the interaction reflectivity and report the closest
    /// squeezed-superposition fit per point
    Sweep {
        /// Lossless closed-form input states
        #[arg(long, conflicts_with = "realistic", required_unless_present = "realistic")]
        ideal: bool,
        /// Full lossy model, storage-averaged
        #[arg(long)]
        realistic: bool,
        /// "paper" or a path to a profile TOML (see also SCSS_CONFIG_DIR)
        #[arg(long, default_value = "paper")]
        config: String,
        /// Profile name inside the TOML file
        #[arg(long, default_value = "paper")]
        profile: String,
        #[arg(long = "r-min", default_value_t = 0.0)]
        r_min: f64,
        #[arg(long = "r-max", default_value_t = 0.9)]
        r_max: f64,
        #[arg(long, default_value_t = 91)]
        steps: usize,
        /// Output CSV ("R,fidelity,alpha,z,squeezing_db")
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate the heralded state at one reflectivity and analyze it
    Simulate {
        #[arg(long, value_enum, default_value = "odd")]
        parity: ParityArg,
        #[arg(long = "R", default_value_t = 0.72)]
        reflectivity: f64,
        #[arg(long, default_value = "paper")]
        config: String,
        #[arg(long, default_value = "paper")]
        profile: String,
        /// Fixed storage round trips (default: average over the configured range)
        #[arg(long = "n-stor")]
        n_stor: Option<u32>,
        /// Output JSON report
        #[arg(long)]
        out: PathBuf,
        /// Optional Wigner grid CSV ("x,p,w")
        #[arg(long)]
        wigner: Option<PathBuf>,
    },
    /// Maximum-likelihood reconstruction from quadrature records
    Tomo {
        /// Input CSV ("x,theta")
        #[arg(long = "in")]
        input: PathBuf,
        /// Homodyne detection efficiency to fold into the measurement operators
        #[arg(long, default_value_t = 0.76)]
        efficiency: f64,
        /// Storage round trips whose loss is also corrected
        #[arg(long = "storage-roundtrips", default_value_t = 15)]
        storage_roundtrips: u32,
        #[arg(long = "loss-per-roundtrip", default_value_t = 0.01)]
        loss_per_roundtrip: f64,
        #[arg(long, default_value_t = 20)]
        truncation: usize,
        /// Report fidelity against the superposition with this amplitude
        #[arg(long = "target-alpha")]
        target_alpha: Option<f64>,
        #[arg(long = "target-z")]
        target_z: Option<f64>,
        /// Bootstrap repetitions for the fidelity confidence interval
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "max-iterations", default_value_t = 2000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Output JSON report
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the output-state generation rate in Hz
    Rate {
        #[arg(long, default_value = "paper")]
        config: String,
        #[arg(long, default_value = "paper")]
        profile: String,
        /// Override the maximum storage round trips
        #[arg(long = "n-stor-max")]
        n_stor_max: Option<u32>,
    },
    /// Fit the loss per round trip from a fidelity-vs-storage series
    DecayFit {
        /// Input CSV ("n_stor,fidelity")
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Re-validate output files against their schemas
    Check {
        paths: Vec<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep {
            ideal,
            realistic: _,
            config,
            profile,
            r_min,
            r_max,
            steps,
            out,
        } => cmd_sweep(&SweepArgs {
            ideal: *ideal,
            config: config.clone(),
            profile: profile.clone(),
            r_min: *r_min,
            r_max: *r_max,
            steps: *steps,
            out: out.clone(),
        }),
        Command::Simulate {
            parity,
            reflectivity,
            config,
            profile,
            n_stor,
            out,
            wigner,
        } => cmd_simulate(&SimulateArgs {
            parity: (*parity).into(),
            reflectivity: *reflectivity,
            config: config.clone(),
            profile: profile.clone(),
            n_stor: *n_stor,
            out: out.clone(),
            wigner_out: wigner.clone(),
        }),
        Command::Tomo {
            input,
            efficiency,
            storage_roundtrips,
            loss_per_roundtrip,
            truncation,
            target_alpha,
            target_z,
            bootstrap,
            seed,
            max_iterations,
            tol,
            out,
        } => cmd_tomo(&TomoArgs {
            input: input.clone(),
            efficiency: *efficiency,
            storage_roundtrips: *storage_roundtrips,
            loss_per_roundtrip: *loss_per_roundtrip,
            truncation: *truncation,
            target_alpha: *target_alpha,
            target_z: *target_z,
            bootstrap: *bootstrap,
            seed: *seed,
            max_iterations: *max_iterations,
            tol: *tol,
            out: out.clone(),
        }),
        Command::Rate {
            config,
            profile,
            n_stor_max,
        } => cmd_rate(&RateArgs {
            config: config.clone(),
            profile: profile.clone(),
            n_stor_max: *n_stor_max,
        }),
        Command::DecayFit { input } => cmd_decay_fit(&DecayFitArgs {
            input: input.clone(),
        }),
        Command::Check { paths } => cmd_check(paths),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
