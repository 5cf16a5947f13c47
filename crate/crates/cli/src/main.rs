//! `zonomed` command-line front end.
//!
//! Exit codes: 0 success, 2 bad input, 3 solver did not converge (the
//! result is still written), 1 I/O failure.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<zonomed::Error> for Failure {
    fn from(e: zonomed::Error) -> Self {
        Failure::input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "zonomed",
    version,
    about = "Zonotope medians and Steiner symmetrization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate a V_j, Wills or polar-volume median of a point cloud.
    Median(MedianArgs),
    /// Intrinsic volumes and Wills functional of a zonotope.
    Intrinsic(IntrinsicArgs),
    /// Closed-form symmetrization of a Gaussian law.
    Gauss(GaussArgs),
    /// Sample-based symmetrization and diagnostics.
    #[command(subcommand)]
    Empirical(EmpiricalCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveArg {
    Vj,
    Wills,
    Polar,
}

#[derive(Args, Serialize)]
pub struct MedianArgs {
    #[arg(long, value_enum)]
    pub objective: ObjectiveArg,
    /// Index of the intrinsic volume (required for `vj`).
    #[arg(long)]
    pub j: Option<usize>,
    /// CSV of sample points, one per row.
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 8)]
    pub multistarts: usize,
    /// Direction-set size for the polar objective.
    #[arg(long, default_value_t = 2048)]
    pub sphere_samples: usize,
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value = "-")]
    pub output: String,
}

#[derive(Args, Serialize)]
pub struct IntrinsicArgs {
    /// CSV of generators, one per row.
    #[arg(long)]
    pub input: String,
    /// Add Gaussian-projection Monte Carlo estimates with this many samples.
    #[arg(long, requires = "seed")]
    pub mc: Option<usize>,
    /// Add the Monte Carlo check of the Wills integral (planar zonotopes).
    #[arg(long, requires = "seed")]
    pub wills_mc: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleArg {
    GeometricSplit,
    DoubleMean,
}

#[derive(Args, Serialize)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["u", "spherize"]))]
pub struct GaussArgs {
    /// JSON `{"mean": [...], "covariance": [[...], ...]}`.
    #[arg(long)]
    pub input: String,
    /// One symmetrization along this direction (comma-separated).
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Iterate to spherical symmetry.
    #[arg(long)]
    pub spherize: bool,
    #[arg(long, value_enum, default_value_t = RuleArg::GeometricSplit)]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Knn,
    ExactLinear,
}

#[derive(Args, Serialize)]
pub struct RegressorArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Knn)]
    pub method: MethodArg,
    /// Neighbours for `knn` (default ceil(sqrt N)).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Subcommand)]
enum EmpiricalCommand {
    /// Symmetrize a sample; writes the new draws as CSV.
    Symmetrize(SymmetrizeArgs),
    /// Uniform sample on a polygon versus its exact symmetral.
    Theorem1(Theorem1Args),
    /// Repeated symmetrization with isotropy reports (JSON lines).
    Explore(ExploreArgs),
}

#[derive(Args, Serialize)]
pub struct SymmetrizeArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub regressor: RegressorArgs,
    #[arg(long, default_value = "-")]
    pub output: String,
    /// Also write a JSON summary (norm reduction) here.
    #[arg(long)]
    pub report: Option<String>,
}

#[derive(Args, Serialize)]
pub struct Theorem1Args {
    /// JSON `{"vertices": [[x, y], ...]}`; the unit square if omitted.
    #[arg(long)]
    pub polygon: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub regressor: RegressorArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyArg {
    RandomSeeded,
    CyclicAxes,
    MaxAnisotropy,
}

#[derive(Args, Serialize)]
pub struct ExploreArgs {
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::RandomSeeded)]
    pub policy: PolicyArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub regressor: RegressorArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "-")]
    pub output: String,
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("ZONOMED_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            Failure::input(format!(
                "ZONOMED_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::io(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Median(a) => commands::median(&a),
        Command::Intrinsic(a) => commands::intrinsic(&a),
        Command::Gauss(a) => commands::gauss(&a),
        Command::Empirical(EmpiricalCommand::Symmetrize(a)) => commands::symmetrize(&a),
        Command::Empirical(EmpiricalCommand::Theorem1(a)) => commands::theorem1(&a),
        Command::Empirical(EmpiricalCommand::Explore(a)) => commands::explore(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("zonomed: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
