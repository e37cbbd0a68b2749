mod output;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qutrit_esd::channels::ChannelKind;
use qutrit_esd::esd::DEFAULT_BISECTION_TOL;
use qutrit_esd::evolution::Mode;
use qutrit_esd::sweep::DEFAULT_GRID_POINTS;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Validation(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qutrit-esd",
    version,
    about = "Qubit-qutrit negativity under local Kraus noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// b parameter(s), comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b: Vec<f64>,
    /// c parameter(s), comma separated; paired with --b, a single value broadcasts
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "a_zero"
    )]
    pub c: Vec<f64>,
    /// Use c = 1 - 3b so that the |00>,|12> weight a vanishes
    #[arg(long)]
    pub a_zero: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Negativity and l1 coherence along gamma_A = gamma_B = gamma
    Sweep {
        #[arg(long)]
        kind: Option<ChannelKind>,
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        state: StateArgs,
        /// Number of gamma steps on [0, 1]; the grid has one more point
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS - 1)]
        gamma_steps: usize,
        /// Bisection tolerance for the reported death point
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
        /// Output file, or a directory when several curves are produced
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// JSON file holding a list of runs
        #[arg(long, conflicts_with_all = ["kind", "mode", "b", "c", "a_zero"])]
        config: Option<PathBuf>,
    },
    /// Death point and revival search; all settings when kind/mode are omitted
    Esd {
        #[arg(long)]
        kind: Option<ChannelKind>,
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// ESD classification of every kind x mode cell over a parameter set
    Table1 {
        /// Optional parameter points; the canonical set is used otherwise
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-check the numerics against every closed form
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 && tol < 0.1 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "--tol must lie in (0, 0.1), got {tol}"
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep {
            kind,
            mode,
            state,
            gamma_steps,
            tol,
            out,
            format,
            config,
        } => {
            check_tol(tol)?;
            if format == Format::Text {
                return Err(config_err("sweep writes csv or json"));
            }
            let specs = match config {
                Some(path) => runs::load_batch(&path, format, tol)?,
                None => {
                    let kind = kind.ok_or_else(|| config_err("--kind is required"))?;
                    let mode = mode.ok_or_else(|| config_err("--mode is required"))?;
                    runs::params_from_args(&state)?
                        .into_iter()
                        .map(|params| runs::RunSpec {
                            kind,
                            mode,
                            params,
                            gamma_steps,
                            tol,
                            format,
                            out: None,
                        })
                        .collect()
                }
            };
            runs::execute(&specs, out.as_deref())
        }
        Command::Esd {
            kind,
            mode,
            state,
            tol,
            out,
            format,
        } => {
            check_tol(tol)?;
            let params = runs::params_from_args(&state)?;
            let reports = runs::esd_reports(kind, mode, &params, tol)?;
            output::emit(out.as_deref(), &output::esd(&reports, format)?)
        }
        Command::Table1 {
            state,
            tol,
            out,
            format,
        } => {
            check_tol(tol)?;
            let params = if state.b.is_empty() && state.c.is_empty() {
                qutrit_esd::esd::canonical_params()
            } else {
                runs::params_from_args(&state)?
            };
            let table = runs::table(&params, tol)?;
            output::emit(out.as_deref(), &output::table(&table, format)?)
        }
        Command::Validate { out, format } => {
            let report = qutrit_esd::validation::run_validation().map_err(config)?;
            output::emit(out.as_deref(), &output::validation(&report, format)?)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(CliError::Validation(format!(
                    "failed checks: {}",
                    failed.join(", ")
                )))
            }
        }
    }
}

fn config_err(msg: &str) -> CliError {
    CliError::Config(msg.to_string())
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
