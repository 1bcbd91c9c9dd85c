#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod table;

use commands::{Failure, Status};

/// Bounds on how ψ-epistemic an ontological model of quantum states can be.
#[derive(Debug, Parser)]
#[command(name = "kappa", version, about)]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, env = "KAPPA_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Master random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the canonical JSON document to this file.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case {
    D3n3,
    D3n4,
    D4n4,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Line-packing construction (needs --d and --n).
    Lemma2,
    /// One state from each mutually unbiased basis (odd prime d, or d ∈ {2, 4}).
    Mub,
    /// Sign-pattern states `(1, ±1, …, ±1)/√d`.
    Hadamard,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rebuild the reference scenarios and compare against the published bounds.
    VerifyAppendix {
        #[arg(long, value_enum, default_value = "all")]
        case: Case,
        #[command(flatten)]
        common: Common,
    },
    /// Build a state family and certify it.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        d: usize,
        /// Satellite count (line-packing family only).
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Find low-error measurements for the states in an ensemble document.
    SolveMeasurements {
        #[arg(long)]
        states: PathBuf,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the bound of a scenario document.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Search states and measurements jointly for the smallest bound.
    Search {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 5000)]
        max_iterations: usize,
        /// Allow complex amplitudes (default: real for d <= 4).
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check the overlap inequality on random finite ontological models.
    #[command(name = "fuzz-lemma1")]
    FuzzLemma1 {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Number of ontic states.
        #[arg(long = "L", default_value_t = 8)]
        ontic: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of κ in the Kochen–Specker qubit model.
    KsCheck {
        /// Bloch-sphere angle between the two states, in degrees.
        #[arg(long, default_value_t = 90.0)]
        angle: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Exit with status 2 when |κ − 1| exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<Status, Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Invalid(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::VerifyAppendix { case, common } => {
            let ids = match case {
                Case::D3n3 => vec![kappa_core::constructions::FixtureId::D3N3],
                Case::D3n4 => vec![kappa_core::constructions::FixtureId::D3N4],
                Case::D4n4 => vec![kappa_core::constructions::FixtureId::D4N4],
                Case::All => kappa_core::constructions::FixtureId::ALL.to_vec(),
            };
            commands::verify_reference(&ids, &common)
        }
        Command::Construct { family, d, n, common } => commands::construct(family, d, n, &common),
        Command::SolveMeasurements { states, restarts, common } => {
            commands::solve(&states, restarts, &common)
        }
        Command::Evaluate { scenario, common } => commands::evaluate(&scenario, &common),
        Command::Search { d, n, restarts, max_iterations, complex, common } => {
            commands::search(d, n, restarts, max_iterations, complex, &common)
        }
        Command::FuzzLemma1 { trials, ontic, n, common } => commands::fuzz(trials, ontic, n, &common),
        Command::KsCheck { angle, samples, tolerance, common } => {
            commands::ks_check(angle, samples, tolerance, &common)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Mismatch) => ExitCode::from(2),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(1)
        }
    }
}
