//! `qramsynth`: synthesize, verify and benchmark state preparation, controlled
//! state preparation and unitary circuits.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, NRange};

#[derive(Parser)]
#[command(name = "qramsynth", version, about = "Circuit synthesis under an ancilla budget")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Common {
    /// Ancilla budget m.
    #[arg(long = "ancilla", default_value_t = 0)]
    pub ancilla: usize,
    /// Construction to use, or `auto` for budget-based dispatch.
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Circuit JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metrics JSON output; printed to stdout when omitted.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Verification tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for `--random` instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip simulator verification.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Prepare a state from |0…0⟩.
    Qsp {
        /// State JSON `{num_qubits, amplitudes}`.
        #[arg(long, required_unless_present = "random", conflicts_with = "random")]
        state: Option<PathBuf>,
        /// Use a seeded random state on this many qubits.
        #[arg(long)]
        random: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Controlled preparation |i⟩|0⟩ ↦ |i⟩|ψ_i⟩.
    Cqsp {
        /// Spec JSON `{k, n, states}`.
        #[arg(long, required_unless_present = "random", conflicts_with = "random")]
        spec: Option<PathBuf>,
        /// Random spec with this many target qubits.
        #[arg(long, requires = "controls")]
        random: Option<usize>,
        /// Control count of a random spec.
        #[arg(long)]
        controls: Option<usize>,
        /// Fixed split for `--method two_stage`.
        #[arg(long)]
        split: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Synthesize a general unitary.
    Unitary {
        /// Matrix JSON `{n, rows}`.
        #[arg(long, required_unless_present = "random", conflicts_with = "random")]
        matrix: Option<PathBuf>,
        /// Use a seeded Haar-random unitary on this many qubits.
        #[arg(long)]
        random: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a circuit against a state, spec or matrix.
    Verify {
        /// Circuit JSON.
        circuit: PathBuf,
        #[arg(long, group = "target")]
        state: Option<PathBuf>,
        #[arg(long, group = "target")]
        spec: Option<PathBuf>,
        #[arg(long, group = "target")]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Sweep sizes and budgets, writing one CSV row per instance.
    Bench {
        /// One of qsp, cqsp, unitary.
        #[arg(long)]
        task: String,
        /// Target qubit range, e.g. `2..8` or `5`.
        #[arg(long, default_value = "2..4")]
        n: NRange,
        /// Control range for cqsp.
        #[arg(long, default_value = "1")]
        k: NRange,
        /// Comma-separated ancilla budgets.
        #[arg(long = "ancilla", value_delimiter = ',', default_value = "0")]
        ancilla: Vec<usize>,
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        no_verify: bool,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Qsp { state, random, common } => commands::qsp(state, random, &common),
        Command::Cqsp { spec, random, controls, split, common } => {
            commands::cqsp(spec, random.zip(controls), split, &common)
        }
        Command::Unitary { matrix, random, common } => commands::unitary(matrix, random, &common),
        Command::Verify { circuit, state, spec, matrix, tol } => {
            commands::verify(&circuit, state, spec, matrix, tol)
        }
        Command::Bench { task, n, k, ancilla, method, seed, tol, no_verify, csv } => {
            commands::bench(&task, n, k, ancilla, &method, seed, tol, !no_verify, csv)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
