use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::lists::{parse_coefficients, parse_grid, Coefficients, GridTriple};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PHASESPACE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "phasespace",
    version,
    about = "Wigner and Sobouti-Nasiri phase-space distributions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Position grid as q_min,q_max,n.
    #[arg(long, global = true, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridTriple>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// JSON file with manifest keys used as defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "phasespace-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistChoice {
    Wigner,
    Sn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableChoice {
    Q,
    P,
    Q2,
    #[value(name = "H")]
    H,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function of a state.
    Wigner {
        #[arg(long)]
        state: Option<String>,
    },
    /// Sobouti-Nasiri distribution of a state.
    Sn {
        #[arg(long)]
        state: Option<String>,
    },
    /// Sobouti-Nasiri distribution file to Wigner function.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Position and momentum marginals with their residuals against the state.
    Marginals {
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum, default_value = "wigner")]
        dist: DistChoice,
    },
    /// Phase-space expectation value next to the trace value.
    Expect {
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_enum)]
        observable: ObservableChoice,
        /// Potential coefficients c0,c1,... in ascending powers of q.
        #[arg(long, value_parser = parse_coefficients, allow_hyphen_values = true)]
        potential: Option<Coefficients>,
    },
    /// Evolve the Wigner function under a polynomial potential.
    Evolve {
        #[arg(long)]
        state: Option<String>,
        #[arg(long, value_parser = parse_coefficients, allow_hyphen_values = true)]
        potential: Option<Coefficients>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Highest series index kept in the potential term.
        #[arg(long)]
        truncation: Option<usize>,
        /// Compare the final state with split-step Schrödinger evolution.
        #[arg(long)]
        oracle: bool,
        /// Write a snapshot every this many steps; 0 writes only the first and last.
        #[arg(long, default_value_t = 0)]
        snapshot_every: usize,
        /// Sample normalization and energy every this many steps.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        log_every: u64,
    },
    /// Run the full invariant suite.
    Verify {
        /// Skip the time-evolution checks.
        #[arg(long)]
        no_dynamics: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Wigner { .. } => "wigner",
            Command::Sn { .. } => "sn",
            Command::Convert { .. } => "convert",
            Command::Marginals { .. } => "marginals",
            Command::Expect { .. } => "expect",
            Command::Evolve { .. } => "evolve",
            Command::Verify { .. } => "verify",
        }
    }
}
