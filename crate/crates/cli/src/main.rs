use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qreg_core::{Algorithm, Quantile, QregError};

mod bench;
mod gen;
mod solve;

#[derive(Parser)]
#[command(name = "qreg", version, about = "Exact quantile regression solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one dataset and print a JSON report.
    Solve(SolveArgs),
    /// Write a synthetic linear dataset.
    Gen(GenArgs),
    /// Time algorithms on generated instances and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "0.5", value_parser = parse_tau)]
    tau: Quantile,
    #[arg(long, default_value = "randqr", value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = parse_magnitude)]
    perturb: f64,
    /// Zero-based response column (default: last).
    #[arg(long)]
    response_column: Option<usize>,
    /// Per-round CSV of the randomized solver.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Level polyline CSV for the k-level solver.
    #[arg(long)]
    dump_level: Option<PathBuf>,
    /// Print the report on one line.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Fraction of points with inflated noise.
    #[arg(long, default_value_t = 0.0)]
    outliers: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma list, or `a..b` for the powers of two from a to b.
    #[arg(long, value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, value_parser = parse_algo, value_delimiter = ',', num_args = 1.., required = true)]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value = "0.5", value_parser = parse_tau)]
    tau: Quantile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = parse_magnitude)]
    perturb: f64,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Sizes(Vec<usize>);

fn parse_tau(s: &str) -> Result<Quantile, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Quantile::new(v).map_err(|e| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.trim().parse().map_err(|e: QregError| e.to_string())
}

fn parse_magnitude(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be finite and non-negative, got {v}"))
    }
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let sizes = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
        if a == 0 || b < a {
            return Err(format!("empty range {s}"));
        }
        std::iter::successors(Some(a), |&n| n.checked_mul(2))
            .take_while(|&n| n <= b)
            .collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?
    };
    if sizes.is_empty() {
        return Err("no sizes given".into());
    }
    Ok(Sizes(sizes))
}

/// Command failure with the process exit code it maps to.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn guard(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<QregError> for Failure {
    fn from(e: QregError) -> Self {
        let code = match e {
            QregError::InvalidArgument(_)
            | QregError::InvalidQuantile(_)
            | QregError::DimensionMismatch { .. } => 2,
            QregError::Degenerate(_)
            | QregError::GuardExceeded(_)
            | QregError::IterationLimit(_) => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve::run(&args),
        Command::Gen(args) => gen::run(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qreg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
