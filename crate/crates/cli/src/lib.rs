//! Command-line front end: reads a TOML configuration, runs bound
//! computations, sweeps, degradedness checks or protocol simulations, and
//! writes CSV or JSON-lines reports.

pub mod commands;
pub mod config;
pub mod output;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{BoundSet, Output};
pub use config::{ConfigError, Format, RunConfig};
pub use output::{write_records, Cell, Record, SCHEMA_VERSION};

/// Failure classes, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Guard(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Guard(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<skec_core::Error> for CliError {
    fn from(e: skec_core::Error) -> Self {
        use skec_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Infeasible(_) | E::NotStochasticallyDegraded(_) => CliError::Infeasible(msg),
            E::GuardExceeded(_) => CliError::Guard(format!("{msg} (raise SKEC_GUARD_ETA to allow it)")),
            E::InvalidDistribution(_) | E::AlphabetMismatch(_) | E::InvalidArgument(_) => CliError::Config(msg),
            _ => CliError::Internal(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "skec", version, about = "Secret-key bounds and protocol simulations for two-way wiretap channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower, ICC, sd and upper bounds of the configured setup.
    Bounds(CommonArgs),
    /// Monte Carlo evaluation of the key agreement protocol.
    Simulate(CommonArgs),
    /// Bounds over a grid of BSC crossovers.
    Sweep(CommonArgs),
    /// Degradedness report of each channel.
    Validate(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Bounds(a) | Command::Simulate(a) | Command::Sweep(a) | Command::Validate(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Seed for every random choice; overrides the file's `seed` (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Worker threads for the optimizers and session runs.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Reads and merges the configuration for a command line.
pub fn load(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::parse(&text, args.seed)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    cfg.out = args.out.clone();
    cfg.format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Jsonl => Format::Jsonl,
    };
    if args.workers == Some(0) {
        return Err(CliError::Config("--workers must be positive".into()));
    }
    cfg.workers = args.workers;
    Ok(cfg)
}

/// Runs one command on a parsed configuration.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let job = || match command {
        Command::Bounds(_) => commands::bounds(cfg),
        Command::Simulate(_) => commands::simulate(cfg),
        Command::Sweep(_) => commands::sweep(cfg),
        Command::Validate(_) => commands::validate(cfg),
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(job),
        None => job(),
    }
}

/// `report.csv` becomes `report.sessions.csv`.
pub fn sessions_path(out: &Path, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    };
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.sessions.{ext}"))
}

fn write_to(path: Option<&Path>, records: &[Record], format: Format) -> Result<(), CliError> {
    let name = path.map_or("<stdout>".to_string(), |p| p.display().to_string());
    let result = match path {
        Some(p) => File::create(p).and_then(|f| write_records(records, format, f)),
        None => {
            let mut lock = std::io::stdout().lock();
            write_records(records, format, &mut lock).and_then(|_| lock.flush())
        }
    };
    result.map_err(|e| CliError::Io(format!("cannot write {name}: {e}")))
}

/// Parses, runs and writes; the error carries the exit status.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load(cli.command.args())?;
    if matches!(cli.command, Command::Simulate(_))
        && cfg.simulate.as_ref().is_some_and(|s| s.per_session)
        && cfg.out.is_none()
    {
        return Err(CliError::Config("per-session output needs --out".into()));
    }
    let out = execute(&cli.command, &cfg)?;
    write_to(cfg.out.as_deref(), &out.records, cfg.format)?;
    if let (Some(sessions), Some(p)) = (&out.sessions, &cfg.out) {
        write_to(Some(&sessions_path(p, cfg.format)), sessions, cfg.format)?;
    }
    Ok(())
}
