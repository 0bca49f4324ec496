//! `stokeswim`: simulations of a bi-flagellated swimmer in viscous
//! flow. Five subcommands share one key = value configuration format
//! and write plain-text artifacts (metadata, tables, summary) into an
//! output directory.
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 for
//! numerical failures, 1 for I/O trouble.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stokeswim_core::{ConfigError, Mode, ModelError, RunConfig};

mod output;
mod runs;

/// Bacteria-inspired bi-flagellated swimmer simulations in Stokes flow.
#[derive(Debug, Parser)]
#[command(name = "stokeswim", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pitch dynamics about a fixed support
    Pivot(RunArgs),
    /// Free rigid-body swimming
    Free(RunArgs),
    /// Dimensionless sweep over tail shape or tail spacing
    Sweep(RunArgs),
    /// Calibrate thrust gains, plan drive speeds, and track a commanded pitch
    Control(RunArgs),
    /// Thrust-gain calibration only
    Calibrate(RunArgs),
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Pivot(_) => Mode::Pivot,
            Command::Free(_) => Mode::Free,
            Command::Sweep(_) => Mode::Sweep,
            Command::Control(_) => Mode::Control,
            Command::Calibrate(_) => Mode::Calibrate,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Pivot(a)
            | Command::Free(a)
            | Command::Sweep(a)
            | Command::Control(a)
            | Command::Calibrate(a) => a,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Key = value configuration file; defaults apply when omitted
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; wins over `out_dir` from the config
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Inline setting, `key=value`; may be given repeatedly
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Everything a run can fail with, tagged with its exit code.
pub(crate) enum CliError {
    Config(ConfigError),
    Model(ModelError),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    let args = command.args();
    let mode = command.mode();
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path, &args.overrides, Some(mode))?,
        None => RunConfig::from_sources(None, &args.overrides, Some(mode))?,
    };
    if let Some(out) = &args.out {
        config.out_dir = out.display().to_string();
    }

    let out_dir = PathBuf::from(&config.out_dir);
    std::fs::create_dir_all(&out_dir)?;
    output::write_metadata(&out_dir, &config)?;

    match mode {
        Mode::Pivot => runs::pivot(&config, &out_dir),
        Mode::Free => runs::free(&config, &out_dir),
        Mode::Sweep => runs::sweep(&config, &out_dir),
        Mode::Control => runs::control(&config, &out_dir),
        Mode::Calibrate => runs::calibrate(&config, &out_dir),
    }
}
