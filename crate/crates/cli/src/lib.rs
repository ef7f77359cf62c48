//! Command-line front end. Every command builds a [`Table`] that is written
//! as CSV (the default) or JSON.
//!
//! SNR flags are in dB and converted with `P = 10^(dB/10)`; the core library
//! only ever sees linear values.

pub mod commands;
pub mod error;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;
pub use table::{Cell, Table};

/// Environment variable holding the worker-count hint.
pub const THREADS_ENV: &str = "RACAP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Bd,
    Awgn,
    /// Infinite-population limit (BD channel, arrival rate λ).
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModelArg {
    Bd,
    Awgn,
}

#[derive(Debug, Parser)]
#[command(name = "racap", version, about = "Rate adaptation and throughput of symmetric random access channels")]
pub struct Cli {
    /// Output format. `simulate` defaults to JSON, everything else to CSV.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold boundaries and per-interval rates of the optimal policy.
    Thresholds(ThresholdsArgs),
    /// Throughput curves over a uniform grid of p (or λ).
    Throughput(ThroughputArgs),
    /// Two-user capacity region: vertices or membership of a rate point.
    Region(RegionArgs),
    /// Distance between the two-user outer and inner AWGN regions.
    Gap(GapArgs),
    /// Monte Carlo slot simulation of a single-rate policy.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Number of users (bd, awgn).
    #[arg(long)]
    pub m: Option<u32>,
    /// Per-user SNR in dB (awgn).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Number of boundaries (poisson).
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ThroughputArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Grid points; the abscissa runs over i/N for i = 1..N.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Largest λ of the poisson grid.
    #[arg(long, default_value_t = 5.0)]
    pub lambda_max: f64,
    /// Comma-separated column names: T, T_lower, T_upper, CSI, AD, ML, ALOHA,
    /// T_poisson. Defaults depend on the model.
    #[arg(long, value_delimiter = ',')]
    pub curves: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// BD levels of user 1.
    #[arg(long, requires = "n2", conflicts_with_all = ["snr1_db", "snr2_db"])]
    pub n1: Option<u32>,
    #[arg(long, requires = "n1")]
    pub n2: Option<u32>,
    /// AWGN SNR of user 1 in dB.
    #[arg(long, allow_negative_numbers = true, requires = "snr2_db")]
    pub snr1_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "snr1_db")]
    pub snr2_db: Option<f64>,
    /// List the region's vertices.
    #[arg(long, conflicts_with = "check")]
    pub vertices: bool,
    /// Membership check of (r1, r2, r12, r22).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub check: Option<Vec<f64>>,
    /// Points per axis of the β grid used by the AWGN inner region.
    #[arg(long, default_value_t = racap_core::two_user::DEFAULT_BETA_GRID)]
    pub beta_grid: usize,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "sweep")]
    pub snr1_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "sweep")]
    pub snr2_db: Option<f64>,
    /// Check every pair P1 >= P2 on a log grid of powers instead.
    #[arg(long, conflicts_with_all = ["snr1_db", "snr2_db"])]
    pub sweep: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: SimModelArg,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub p: f64,
    /// `auto` uses the optimal threshold policy; otherwise a fixed per-user rate.
    #[arg(long, default_value = "auto")]
    pub rate: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub slots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    #[arg(long, default_value_t = racap_core::simulator::DEFAULT_BATCH_SIZE)]
    pub batch_size: u64,
}

impl Cli {
    fn default_format(&self) -> Format {
        match self.command {
            Command::Simulate(_) => Format::Json,
            _ => Format::Csv,
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| self.default_format())
    }
}

/// Builds the table for a parsed command line.
pub fn execute(cli: &Cli) -> Result<Table, CliError> {
    match &cli.command {
        Command::Thresholds(a) => commands::thresholds(a),
        Command::Throughput(a) => commands::throughput(a),
        Command::Region(a) => commands::region(a),
        Command::Gap(a) => commands::gap(a),
        Command::Simulate(a) => commands::simulate(a),
    }
}

/// Configures the global worker pool from [`THREADS_ENV`], if set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs a parsed command line and writes its output. A failed check still
/// writes the table before returning the error.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let table = execute(cli)?;
    table.check_finite()?;
    let fmt = cli.format();
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(&table, fmt, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            emit(&table, fmt, &mut w)?;
            w.flush()?;
        }
    }
    commands::verdict(&table)
}

fn emit<W: Write>(table: &Table, fmt: Format, w: &mut W) -> Result<(), CliError> {
    match fmt {
        Format::Csv => table.write_csv(w),
        Format::Json => table.write_json(w),
    }
}
