//! `qprenorm`: fixed points, spectra, superstable parameters, slopes of the
//! reducibility-loss boundaries and their dynamical verification.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use qprenorm_core::RenormError;
use std::path::PathBuf;
use std::process::ExitCode;

const JOBS_ENV: &str = "RENORM_QP_JOBS";

#[derive(Debug, Parser)]
#[command(name = "qprenorm", version, about = "Quasi-periodic doubling renormalization toolkit")]
struct Cli {
    /// Print the default configuration as JSON and exit.
    #[arg(long)]
    print_default_config: bool,

    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Worker threads (default: logical cores). RENORM_QP_JOBS overrides it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the doubling fixed point and write fixed_point.json.
    FixedPoint,
    /// Spectra of the quasi-periodic blocks over a rotation grid.
    Spectrum {
        /// Number of equally spaced rotation numbers in [0, 1).
        #[arg(long, default_value_t = 64)]
        omega_grid: usize,
        /// Eigenvalues kept per rotation number.
        #[arg(long, default_value_t = 8)]
        top: usize,
        /// Emit the spectrum of the one-dimensional derivative instead.
        #[arg(long)]
        one_dim: bool,
    },
    /// Superstable parameters of the logistic family and cascade ratios.
    Superstable {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Boundary slopes at zero forcing from the renormalization formula.
    Slopes {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Drop the forcing direction (slopes vanish).
        #[arg(long)]
        unforced: bool,
        /// family.json describing the forcing.
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Trace the boundaries by direct dynamics and compare with the formula.
    Verify {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Largest accepted relative slope error.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Classify an (alpha, eps) grid by the reducibility indicator.
    Scan {
        /// Period level of the curve (period 2^n).
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 3.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 3.5)]
        alpha_max: f64,
        #[arg(long, default_value_t = 51)]
        alpha_steps: usize,
        #[arg(long, default_value_t = 0.0)]
        eps_min: f64,
        #[arg(long, default_value_t = 0.1)]
        eps_max: f64,
        #[arg(long, default_value_t = 21)]
        eps_steps: usize,
        #[arg(long)]
        family: Option<PathBuf>,
    },
}

/// Failures that are not toolkit errors.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    MissingArtifact(String),
    Verification(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::MissingArtifact(m) => write!(f, "missing artifact: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<CliError>() {
        return match e {
            CliError::Config(_) => 4,
            CliError::MissingArtifact(_) => 5,
            CliError::Verification(_) => 6,
        };
    }
    match err.downcast_ref::<RenormError>() {
        Some(
            RenormError::NoConvergence { .. }
            | RenormError::RootLost { .. }
            | RenormError::WindowNotFound(_)
            | RenormError::IllConditioned(_)
            | RenormError::LinAlg(_),
        ) => 2,
        Some(RenormError::Config(_)) => 4,
        Some(RenormError::Artifact(_)) => 5,
        Some(_) => 3,
        None => 1,
    }
}

fn jobs(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{JOBS_ENV} must be a positive integer, got {v:?}")).into()),
        },
        Err(_) => match flag {
            Some(0) => Err(CliError::Config("--jobs must be positive".into()).into()),
            other => Ok(other),
        },
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.print_default_config {
        println!("{}", serde_json::to_string_pretty(&qprenorm_core::RenormConfig::default())?);
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Config("no subcommand given (see --help)".into()).into());
    };
    if let Some(n) = jobs(cli.common.jobs)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    commands::dispatch(&cli.common, command)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
