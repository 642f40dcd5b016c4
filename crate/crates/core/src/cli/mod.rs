//! The `hcdensity` command line.
//!
//! ```text
//! hcdensity estimate --data F --config C --out R [--encoding signs|bits] [--threads T] [--cells SPEC]
//! hcdensity cv       --data F --config C --out R [--loss se|kl] [--threads T]
//! hcdensity query    --fit R --cells SPEC --out R2 [--response D]
//! hcdensity bench    --out R [--max-n 20]
//! hcdensity synth    --config C --out F [--count K] [--seed S]
//! ```
//!
//! Exit codes: `0` success, `2` config or parse error, `3` capacity error,
//! `4` numeric error (overflow or degenerate normalizer).

mod bench;
mod commands;
pub mod config;
pub mod data;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cross_validation::LossKind;
use crate::error::Error;
use data::Encoding;

pub use bench::{BenchReport, BenchRow, ScalingCheck};
pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "hcdensity", version, about = "Density estimation on the binary hypercube")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate probabilities at chosen cells (or all cells for n <= 20).
    Estimate(EstimateArgs),
    /// Select estimator parameters by leave-one-out cross-validation.
    Cv(CvArgs),
    /// Evaluate a fitted report at cells, with optional conditional expectations.
    Query(QueryArgs),
    /// Time normalizers and element evaluations across dimensions.
    Bench(BenchArgs),
    /// Write seeded synthetic observations from the [synth] block.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub encoding: Option<Encoding>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Comma-separated sign strings or 1-based indexes, or `all`.
    #[arg(long)]
    pub cells: Vec<String>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_loss)]
    pub loss: Option<LossKind>,
    #[arg(long, value_enum)]
    pub encoding: Option<Encoding>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Report written by `estimate` or `cv`.
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long)]
    pub cells: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// 1-based coordinate whose conditional expectation is reported.
    #[arg(long)]
    pub response: Option<usize>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Largest dimension for rows that need dense tables.
    #[arg(long, default_value_t = 20)]
    pub max_n: usize,
    /// Shorter timing batches.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub encoding: Option<Encoding>,
}

fn parse_loss(s: &str) -> Result<LossKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 3,
        Error::Overflow(_) | Error::DegenerateNormalizer(_) => 4,
        _ => 2,
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Estimate(_) => "estimate",
            Command::Cv(_) => "cv",
            Command::Query(_) => "query",
            Command::Bench(_) => "bench",
            Command::Synth(_) => "synth",
        }
    }
}

/// Runs one command and returns its human-readable summary.
pub fn run(cli: &Cli) -> crate::Result<String> {
    match &cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Cv(a) => commands::cv(a),
        Command::Query(a) => commands::query(a),
        Command::Bench(a) => bench::run(a),
        Command::Synth(a) => commands::synth(a),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("hcdensity {}: {e}", cli.command.name());
            exit_code(&e)
        }
    }
}
