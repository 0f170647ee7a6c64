use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use qreg_core::{generate_synthetic, solve, Algorithm, QregError, Run, SolveOptions, SyntheticSpec};
use serde::Serialize;

use crate::{BenchArgs, Failure};

/// Relative objective gap tolerated against the oracle.
const AGREEMENT: f64 = 1e-9;

#[derive(Serialize)]
struct Row {
    algo: &'static str,
    n: usize,
    d: usize,
    rep: u32,
    seed: u64,
    wall_ms: f64,
    objective: f64,
    oracle_gap: Option<f64>,
    vertices_visited: u64,
    iterations: u64,
}

/// Largest `C(n, d) * n` for which the oracle runs without being asked.
const ORACLE_BUDGET: f64 = 1e9;

fn oracle_affordable(n: usize, d: usize) -> bool {
    let subsets = (0..d).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    subsets * n as f64 <= ORACLE_BUDGET
}

fn instance_seed(seed: u64, n: usize, rep: u32) -> u64 {
    seed ^ ((n as u64) << 24) ^ (u64::from(rep) << 8)
}

pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    if let Some(a) = args.algos.iter().find(|a| !a.supports(args.d)) {
        return Err(Failure::usage(format!("--algos: {a} needs d = 2")));
    }
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| {
            QregError::Io {
                path: path.clone(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = csv::Writer::from_writer(sink);
    let mut disagreements = Vec::new();

    for &n in &args.sizes.0 {
        for rep in 0..args.reps {
            let seed = instance_seed(args.seed, n, rep);
            let ds = generate_synthetic(&SyntheticSpec::new(n, args.d, seed))
                .map_err(|e| Failure::usage(format!("--sizes: {e}")))?
                .dataset;
            let opts = SolveOptions {
                seed,
                perturb: args.perturb,
                trace: false,
            };
            let timed = |algo: Algorithm| -> Result<(Run, f64), Failure> {
                let clock = Instant::now();
                let run = solve(&ds, args.tau, algo, &opts)?;
                Ok((run, clock.elapsed().as_secs_f64() * 1e3))
            };
            let wants_oracle = args.algos.contains(&Algorithm::Oracle) || oracle_affordable(n, args.d);
            let oracle = if wants_oracle {
                Some(timed(Algorithm::Oracle)?)
            } else {
                None
            };
            let reference = oracle.as_ref().map(|(run, _)| run.solution.objective);
            for &algo in &args.algos {
                let (run, wall_ms) = match (&oracle, algo) {
                    (Some(done), Algorithm::Oracle) => done.clone(),
                    _ => timed(algo)?,
                };
                let sol = run.solution;
                let gap = reference.map(|o| (sol.objective - o).abs() / o.abs().max(1.0));
                if gap.is_some_and(|g| g > AGREEMENT) {
                    disagreements.push(format!("{algo} n={n} rep={rep}"));
                }
                out.serialize(Row {
                    algo: algo.name(),
                    n,
                    d: args.d,
                    rep,
                    seed,
                    wall_ms,
                    objective: sol.objective,
                    oracle_gap: gap,
                    vertices_visited: sol.stats.vertices_visited,
                    iterations: sol.stats.iterations,
                })
                .map_err(|e| QregError::Csv(e.to_string()))?;
            }
            out.flush().map_err(|e| QregError::Csv(e.to_string()))?;
        }
    }
    if disagreements.is_empty() {
        Ok(())
    } else {
        Err(Failure::guard(format!(
            "objective differs from the oracle: {}",
            disagreements.join(", ")
        )))
    }
}
