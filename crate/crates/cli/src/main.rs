//! `qpcode` command-line tool.

mod codes;
mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpcode::ErrorKind;

#[derive(Parser, Debug)]
#[command(name = "qpcode", version, about = "Distance-4 quasi-perfect binary codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a parity-check matrix and write it with its spec.
    Construct(ConstructArgs),
    /// Weight spectrum by the doubling recursion and/or the enumeration oracle.
    Spectrum(SpectrumArgs),
    /// Correctable erasure patterns per weight.
    Erasure(ErasureArgs),
    /// Failure probability of the product-code decoder.
    Simulate(SimulateArgs),
    /// Reproduce the erasure (1) or product-code (2) table.
    Table(TableArgs),
    /// Re-run a manifest and compare output digests.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Eh,
    Panchenko,
    General,
    Seed,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Redundancy (number of rows).
    #[arg(long)]
    pub r: Option<usize>,
    /// Length parameter of the general family.
    #[arg(long)]
    pub g: Option<u32>,
    /// Seed name (M, S, EH3, example_9_5) or a matrix file.
    #[arg(long)]
    pub seed: Option<String>,
    /// Remove this many trailing columns.
    #[arg(long)]
    pub shorten: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum SpectrumMethod {
    Recursion,
    Oracle,
    Both,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Code name (eh7, panchenko8, qp7g3, p8-8, ...) or matrix file.
    #[arg(long)]
    pub code: String,
    #[arg(long, value_enum, default_value = "both")]
    pub method: SpectrumMethod,
    /// Spectrum of the dual code instead.
    #[arg(long)]
    pub dual: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ErasureArgs {
    #[arg(long)]
    pub code: String,
    #[arg(long, default_value_t = 4)]
    pub rho_min: usize,
    #[arg(long)]
    pub rho_max: usize,
    /// Enumerate every pattern (default).
    #[arg(long, group = "mode")]
    pub exact: bool,
    /// Sample this many uniform patterns per weight.
    #[arg(long, group = "mode")]
    pub sample: Option<u64>,
    /// Report only the inclusion-exclusion bound.
    #[arg(long, group = "mode")]
    pub psi: bool,
    /// Report the recursive estimate with this depth (`full` for no limit).
    #[arg(long, group = "mode")]
    pub recursive: Option<String>,
    /// Largest number of subsets enumerated exactly.
    #[arg(long, default_value_t = qpcode::erasure::DEFAULT_EXACT_BUDGET)]
    pub budget: u64,
    /// Parameter of the entropy approximation, in (r-1, r].
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Decimal places for fractions.
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub dplus: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub stratified: bool,
    #[arg(long, requires = "stratified")]
    pub kmax: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub per_stratum: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub eps_tail: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub which: u8,
    /// Table 1: comma-separated code names (default: the four published rows).
    #[arg(long, value_delimiter = ',')]
    pub codes: Vec<String>,
    #[arg(long, default_value_t = 4)]
    pub rho_min: usize,
    #[arg(long, default_value_t = 7)]
    pub rho_max: usize,
    /// Table 1: largest C(n, rho) enumerated; bigger cells are sampled.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 100_000_000)]
    pub samples: u64,
    /// Table 2: channel error probabilities.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 5e-3])]
    pub p: Vec<f64>,
    /// Table 2: decoding radii.
    #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 4, 5, 6])]
    pub dplus: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub stratified: bool,
    #[arg(long, default_value_t = 10_000)]
    pub per_stratum: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub eps_tail: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("QPCODE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| qpcode::Error::InvalidArgument(format!("QPCODE_THREADS = `{v}` is not a number")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qpcode::Error>().map(qpcode::Error::kind) {
        Some(ErrorKind::Precondition) => 2,
        Some(ErrorKind::Consistency) => 3,
        Some(ErrorKind::Budget) => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(cli.command, &argv));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
