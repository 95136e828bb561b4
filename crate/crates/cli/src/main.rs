//! `qfound`: spectra, Floydian trajectories and invariant audits.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 empty result,
//! 3 audit failure.

mod audit;
mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qfound::qshje::QshjeError;
use qfound::saqm::SaqmError;
use qfound::schrodinger1d::SchrodingerError;
use qfound::schwarzian::{RealGrid, SchwarzianError};

use config::{PotentialSpec, RunConfig, Tolerances};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Empty(String),
    #[error("audit failed")]
    AuditFailed,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Empty(_) => 2,
            CliError::AuditFailed => 3,
            _ => 1,
        }
    }
}

impl From<SchrodingerError> for CliError {
    fn from(e: SchrodingerError) -> Self {
        match e {
            SchrodingerError::NoEigenvalueInRange { .. } => CliError::Empty(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<QshjeError> for CliError {
    fn from(e: QshjeError) -> Self {
        match e {
            QshjeError::Schrodinger(e) => e.into(),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<SchwarzianError> for CliError {
    fn from(e: SchwarzianError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SaqmError> for CliError {
    fn from(e: SaqmError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "qfound",
    version,
    about = "Quantum Hamilton-Jacobi and SAQM numerics"
)]
struct Cli {
    /// Reduced Planck constant.
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,
    /// Particle mass (a potential's own `m=` takes precedence).
    #[arg(long, global = true, default_value_t = 1.0)]
    mass: f64,
    /// free | harmonic[:m=..,w=..] | well:L=.. | linear:a=.. | table:PATH
    #[arg(long, global = true, value_parser = config::parse_potential)]
    potential: Option<PotentialSpec>,
    /// Energy window `a:b` for `spectrum`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = config::parse_range)]
    range: Option<(f64, f64)>,
    /// Energy for `trajectory`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// Energy step of the time derivative (default scales with E).
    #[arg(long = "de", global = true, allow_hyphen_values = true)]
    de: Option<f64>,
    /// Grid `qmin:qmax:n` (default depends on the potential).
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = config::parse_grid)]
    grid: Option<RealGrid>,
    /// Seed of the randomized audit suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replace a named tolerance, e.g. `residual=1e-6`; repeatable.
    #[arg(long = "tol-override", global = true, value_name = "NAME=VALUE", value_parser = config::parse_override)]
    tol_override: Vec<(String, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound-state energies and node counts in `--range`.
    Spectrum {
        /// Largest number of levels reported.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Floydian trajectory `t, q, p` at `--energy`.
    Trajectory {
        /// Also write `q, S0, p, Q, residual` to this CSV file.
        #[arg(long)]
        action_out: Option<PathBuf>,
    },
    /// Check the invariants of a suite and emit a JSON report.
    Audit {
        #[arg(value_enum)]
        suite: audit::Suite,
    },
}

fn required<T: Clone>(value: &Option<T>, flag: &str, command: &str) -> Result<T, CliError> {
    value
        .clone()
        .ok_or_else(|| CliError::Input(format!("{command} needs --{flag}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    for (name, x) in [("hbar", cli.hbar), ("mass", cli.mass)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(CliError::Input(format!("--{name} must be positive")));
        }
    }
    let cfg = RunConfig {
        hbar: cli.hbar,
        mass: cli.mass,
        grid: cli.grid,
        seed: cli.seed,
        tolerances: Tolerances::with_overrides(&cli.tol_override)?,
    };
    // data is buffered and written only once the command succeeded
    let mut data = Vec::new();
    let mut result = match &cli.command {
        Command::Spectrum { count } => {
            let pot = cfg.potential(&required(&cli.potential, "potential", "spectrum")?)?;
            let range = required(&cli.range, "range", "spectrum")?;
            commands::spectrum(&cfg, &pot, range, *count, cli.format, &mut data)
        }
        Command::Trajectory { action_out } => {
            let pot = cfg.potential(&required(&cli.potential, "potential", "trajectory")?)?;
            let energy = required(&cli.energy, "energy", "trajectory")?;
            commands::trajectory(
                &cfg,
                &pot,
                energy,
                cli.de,
                cli.format,
                action_out.as_deref(),
                &mut data,
            )
        }
        Command::Audit { suite } => {
            let (report, pass) = audit::run(*suite, cfg.seed, &cfg.tolerances)?;
            writeln!(data, "{}", serde_json::to_string_pretty(&report)?)?;
            eprintln!(
                "audit {}: {}",
                report["suite"].as_str().unwrap_or_default(),
                if pass { "pass" } else { "FAIL" }
            );
            if pass {
                Ok(())
            } else {
                Err(CliError::AuditFailed)
            }
        }
    };
    // a failed audit still emits its report
    if result.is_ok() || matches!(result, Err(CliError::AuditFailed)) {
        let written = match &cli.out {
            Some(path) => std::fs::write(path, &data),
            None => std::io::stdout().lock().write_all(&data),
        };
        match written {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => result = Err(e.into()),
            _ => {}
        }
    }
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfound: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
