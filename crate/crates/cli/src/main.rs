//! `ebc`: classify coating scalings, evaluate boundary operators, run the
//! two-domain and effective solvers, and sweep coating thicknesses.
//!
//! Every subcommand reads one JSON config (`--config`) and writes its
//! outputs under `--out` (default `./out`). Exit codes: 0 success, 2 config
//! validation error, 3 unsupported scaling regime, 4 solver failure. Errors
//! are also emitted as a JSON object on stderr.

use clap::{Parser, Subcommand};
use ebc_core::config::{
    surface_from_harmonics, ClassifyConfig, ConvergeConfig, OperatorsConfig, SolveEffectiveConfig,
    SolveFullConfig,
};
use ebc_core::stepping::Parallelism;
use ebc_core::{effective, full, harness, io, operators, scaling};
use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ebc",
    version,
    about = "thin-coating effective boundary condition laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a conductivity scaling into its effective boundary condition.
    Classify(CommonArgs),
    /// Evaluate a boundary operator on surface data, mode by mode.
    Operators(CommonArgs),
    /// Solve the full two-domain problem.
    SolveFull(CommonArgs),
    /// Solve the effective model.
    SolveEffective(CommonArgs),
    /// Run a thickness sweep comparing the full and effective solutions.
    Converge(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path of the JSON configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ebc_core::Error> for Failure {
    fn from(e: ebc_core::Error) -> Self {
        use ebc_core::Error::*;
        let code = match &e {
            InvalidSpec(_) | GridTooCoarse { .. } | Json(_) | TrajectoryMismatch(_) => 2,
            UnsupportedRegime(_) | HypothesisViolated(_) => 3,
            SolverFailure { .. } | InvariantViolation(_) | Io(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load<C: DeserializeOwned>(path: &Path) -> Result<C, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read config {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        message: format!("cannot parse config {}: {e}", path.display()),
    })
}

fn parallelism(threads: Option<usize>) -> Parallelism {
    match threads {
        Some(n) if n > 1 => Parallelism::Threads(n),
        _ => Parallelism::Serial,
    }
}

fn write(path: &Path, content: &str) -> Result<(), Failure> {
    io::atomic_write(path, content.as_bytes()).map_err(|e| Failure {
        code: 4,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn pretty<S: serde::Serialize>(value: &S) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: 4,
        message: format!("cannot render json: {e}"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(args) => classify(args),
        Command::Operators(args) => run_operators(args),
        Command::SolveFull(args) => solve_full(args),
        Command::SolveEffective(args) => solve_effective(args),
        Command::Converge(args) => converge(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": failure.message, "exit_code": failure.code })
            );
            ExitCode::from(failure.code)
        }
    }
}

fn classify(args: &CommonArgs) -> Result<(), Failure> {
    let cfg: ClassifyConfig = load(&args.config)?;
    let scaling = cfg.scaling.to_scaling()?;
    let report = scaling::classify(cfg.outer_bc, &scaling)?;
    let json = pretty(&report)?;
    write(&args.out.join("regime.json"), &json)?;
    println!("{json}");
    Ok(())
}

fn run_operators(args: &CommonArgs) -> Result<(), Failure> {
    let cfg: OperatorsConfig = load(&args.config)?;
    let g = surface_from_harmonics(cfg.torus, &cfg.g)?;
    let flux = operators::apply_operator(&cfg.operator, &g)?;
    let csv = io::operators_csv(&cfg.operator, &g, &flux);
    let path = args.out.join("operators.csv");
    write(&path, &csv)?;
    println!("{}", path.display());
    Ok(())
}

fn solve_full(args: &CommonArgs) -> Result<(), Failure> {
    let cfg: SolveFullConfig = load(&args.config)?;
    let traj = full::solve_full(&cfg.problem, parallelism(cfg.threads))?;
    let energy = full::energy_report(&traj, &cfg.problem)?;
    let traj_path = args.out.join("trajectory.csv");
    write(&traj_path, &io::trajectory_csv(&traj, cfg.csv_stamps))?;
    let energy_path = args.out.join("energy.csv");
    write(&energy_path, &io::energy_csv(&energy))?;
    println!("{}", traj_path.display());
    println!("{}", energy_path.display());
    Ok(())
}

fn solve_effective(args: &CommonArgs) -> Result<(), Failure> {
    let cfg: SolveEffectiveConfig = load(&args.config)?;
    let config_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let spec = cfg.to_spec(&config_dir)?;
    let traj = effective::solve_effective(&spec, parallelism(cfg.threads))?;
    let energy = effective::energy_report(&traj, &spec)?;
    let traj_path = args.out.join("trajectory.csv");
    write(&traj_path, &io::trajectory_csv(&traj, cfg.csv_stamps))?;
    let energy_path = args.out.join("energy.csv");
    write(&energy_path, &io::energy_csv(&energy))?;
    println!("{}", traj_path.display());
    println!("{}", energy_path.display());
    Ok(())
}

fn converge(args: &CommonArgs) -> Result<(), Failure> {
    let cfg: ConvergeConfig = load(&args.config)?;
    let experiment = cfg.to_experiment()?;
    let report = harness::run_convergence(&experiment, parallelism(cfg.threads))?;
    write(&args.out.join("report.csv"), &io::convergence_csv(&report))?;
    let json = pretty(&report)?;
    write(&args.out.join("summary.json"), &json)?;
    println!("{json}");
    Ok(())
}
