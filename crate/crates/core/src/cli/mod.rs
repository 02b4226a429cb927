//! Command-line front end. [`run`] parses arguments, dispatches and returns
//! the process exit code: 0 on success, 1 when a verification suite fails,
//! 2 for domain errors such as an unstable configuration and 64 for usage
//! errors.

mod commands;
mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "AOI_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "aoi-lab", version, about = "Average age of information with aged updates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate closed forms for one model.
    Analytic(ModelArgs),
    /// Simulate replications of a model or a scenario file.
    Simulate(SimulateArgs),
    /// Reproduce a tandem table.
    Table(TableArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Zero-wait correction and bounds as the error probability varies.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pretty", global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// mm1, zero-wait, tandem-two, tandem-chain, hetero-tandem or retrial.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Service rates of a tandem chain, final queue last.
    #[arg(long, value_delimiter = ',')]
    pub rates: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub reps: Option<u32>,
    /// Observed departures per replication, after the warm-up.
    #[arg(long)]
    pub departures: Option<u64>,
    #[arg(long)]
    pub warmup: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Scenario file (TOML); flags given alongside override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the packet log of the first replication here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Number of queues, with loads evenly spaced over [0.1, 0.9].
    #[arg(long, default_value_t = 3)]
    pub queues: usize,
    /// Explicit loads instead of `--queues`.
    #[arg(long, value_delimiter = ',')]
    pub loads: Vec<f64>,
    /// Every ordering of the loads instead of slowest-last only.
    #[arg(long)]
    pub all_orderings: bool,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theorem1,
    AppendixLemmas,
    Bounds,
}

#[derive(Debug, Clone, Args)]
pub struct VerifySuiteArgs {
    #[arg(value_enum)]
    pub suite: Suite,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub suite: VerifySuiteArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Grid points over alpha in [0, 0.95].
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Seed from the flag, then the environment, then the built-in default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got '{v}'")))
        }
        Err(_) => Ok(crate::DEFAULT_SEED),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(stdout, "{}", e.render()) } else { write!(stderr, "{}", e.render()) };
            return code;
        }
    };
    match commands::dispatch(&cli.command, stdout) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Domain(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DOMAIN
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
