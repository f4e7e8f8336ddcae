//! `barne-kit`: classify population points, scan the simplex, simulate
//! consensus rounds, run equilibrium checks on fixture games and compare
//! scans across amendment levels.

mod check;
mod compare;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use barne_core::endorsement::{
    classify_point, inequality_report, render_svg, simplex_scan, special_areas, Amendments, ModelError, ProtocolParams,
};
use barne_core::game::SimplexPoint;
use barne_core::simulator::{
    empirical_vs_analytic, run_simulation, run_with_trace, write_trace_csv, SimConfigFile, SimError,
};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Output(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Output(_) => CliError::Io(e.to_string()),
            SimError::Model(m) => m.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "barne-kit", version, about = "BAR-Nash equilibrium analysis of quorum endorsement protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one population point (f Byzantine, g rational agents).
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        f: usize,
        #[arg(short, long)]
        g: usize,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Classify every point of the simplex and write CSV, JSON and SVG maps.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Run seeded consensus rounds and compare payoffs with the analytic model.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        rounds: Option<u64>,
        /// Per-round CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Run an equilibrium check on a fixture game, e.g.
    /// `check congestion bar-strong f_bar=1`.
    Check {
        /// congestion, pd or endorsement-small
        fixture: String,
        /// barne, bar-strong, delta-stable, globally-stable, mixed or inclusion-chain
        concept: String,
        /// key=value arguments
        args: Vec<String>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Compare scan JSON files produced at the three amendment levels.
    Compare {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        fines: PathBuf,
        #[arg(long)]
        traps: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Classify { config, f, g, out_json } => {
            let params = load_params(&config)?;
            let verdict = classify_point(&params, f, g)?;
            let point = SimplexPoint::new(params.n, f, g).map_err(|e| CliError::Invalid(e.to_string()))?;
            let inequalities = inequality_report(&params, point, barne_core::endorsement::Strategy::Honest)?;
            let report = json!({
                "params": params,
                "verdict": verdict,
                "special_areas": special_areas(&params, f, g)?,
                "inequalities_against_honest_rationals": inequalities,
            });
            emit(&report, out_json.as_deref())
        }
        Command::Scan { config, out_csv, out_json, out_svg } => {
            let params = load_params(&config)?;
            if params.amendments == Amendments::Base && 2 * params.quorum > params.n + 1 {
                eprintln!(
                    "warning: Q={} exceeds (n+1)/2={:.1}; without amendments honest endorsement needs Q ≤ (n+1)/2 \
                     and cannot be a BARNE anywhere",
                    params.quorum,
                    (params.n + 1) as f64 / 2.0
                );
            }
            let map = simplex_scan(&params)?;
            if let Some(path) = out_csv {
                write(&path, map.to_csv_string()?)?;
            }
            if let Some(path) = out_json {
                write(&path, map.to_json()? + "\n")?;
            }
            if let Some(path) = out_svg {
                write(&path, render_svg(&map))?;
            }
            emit(&json!({ "params": params, "summary": map.summary }), None)
        }
        Command::Simulate { config, seed, rounds, trace, out_json } => {
            let file = SimConfigFile::from_json(&read(&config)?)?;
            let config = file.resolve(rounds, seed)?;
            let result = match trace {
                Some(path) => {
                    let (result, records) = run_with_trace(&config)?;
                    let mut buf = Vec::new();
                    write_trace_csv(&records, &mut buf)?;
                    write(&path, buf)?;
                    result
                }
                None => run_simulation(&config)?,
            };
            let comparison = if config.focal().is_some() {
                Some(empirical_vs_analytic(
                    std::slice::from_ref(&result),
                    &config.params,
                    config.point,
                    config.rational_strategy,
                )?)
            } else {
                None
            };
            emit(&json!({ "result": result, "comparison": comparison }), out_json.as_deref())
        }
        Command::Check { fixture, concept, args, out_json } => {
            let report = check::run(&fixture, &concept, &args)?;
            emit(&report, out_json.as_deref())
        }
        Command::Compare { base, fines, traps, out } => {
            let scans = [&base, &fines, &traps].map(|p| read(p));
            let [base, fines, traps] = scans;
            let report = compare::compare(&base?, &fines?, &traps?)?;
            emit(&report, out.as_deref())
        }
    }
}

fn load_params(path: &Path) -> Result<ProtocolParams> {
    Ok(ProtocolParams::from_json(&read(path)?)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Pretty JSON to `path`, or to stdout when no path is given.
fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    match path {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
