//! One entry point over every algorithm, with input perturbation and a
//! single retry on degenerate input.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{perturb, Dataset, Quantile};
use crate::error::{QregError, Result};
use crate::geometry::vertex_from_subset;
use crate::klevel::qreg2d_solve;
use crate::objective::compute_score;
use crate::oracle::{brute_force_solve, neighbor_descent_solve_2d, Solution};
use crate::randqr::{randqr_solve, randqr_solve_traced, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Oracle,
    Neighbor,
    Kset,
    RandQr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Oracle,
        Algorithm::Neighbor,
        Algorithm::Kset,
        Algorithm::RandQr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Oracle => "oracle",
            Algorithm::Neighbor => "neighbor",
            Algorithm::Kset => "kset",
            Algorithm::RandQr => "randqr",
        }
    }

    /// Whether the algorithm handles `d` parameters.
    pub fn supports(self, d: usize) -> bool {
        match self {
            Algorithm::Oracle | Algorithm::RandQr => true,
            Algorithm::Neighbor | Algorithm::Kset => d == 2,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = QregError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| QregError::InvalidArgument(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub seed: u64,
    /// Relative jitter applied to the input before solving; 0 disables it.
    pub perturb: f64,
    /// Record the randomized solver's rounds.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            perturb: 1e-9,
            trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    /// Solution on the unperturbed data.
    pub solution: Solution,
    /// Perturbation used by the attempt that succeeded.
    pub perturb_magnitude: f64,
    pub trace: Vec<TraceRow>,
}

/// Solves `ds` with `algo`.
///
/// The solver runs on a perturbed copy; its support is then refit on the
/// original points and scored there. A degenerate failure is retried once
/// on a fresh perturbation.
pub fn solve(ds: &Dataset, tau: Quantile, algo: Algorithm, opts: &SolveOptions) -> Result<Run> {
    if !algo.supports(ds.d()) {
        return Err(QregError::DimensionMismatch {
            expected: 2,
            found: ds.d(),
        });
    }
    match attempt(ds, tau, algo, opts.perturb, opts.seed, opts) {
        Err(e) if e.is_retryable() => {
            let magnitude = opts.perturb.max(1e-9);
            attempt(ds, tau, algo, magnitude, opts.seed.wrapping_add(1), opts)
        }
        other => other,
    }
}

fn attempt(
    ds: &Dataset,
    tau: Quantile,
    algo: Algorithm,
    magnitude: f64,
    seed: u64,
    opts: &SolveOptions,
) -> Result<Run> {
    let work = perturb(ds, magnitude, seed)?;
    let mut trace = Vec::new();
    let sol = match algo {
        Algorithm::Oracle => brute_force_solve(&work, tau)?,
        Algorithm::Neighbor => neighbor_descent_solve_2d(&work, tau, None)?,
        Algorithm::Kset => qreg2d_solve(&work, tau)?,
        Algorithm::RandQr if opts.trace => {
            let (sol, rows) = randqr_solve_traced(&work, tau, seed)?;
            trace = rows;
            sol
        }
        Algorithm::RandQr => randqr_solve(&work, tau, seed)?,
    };
    Ok(Run {
        solution: refit(ds, tau, sol, magnitude),
        perturb_magnitude: magnitude,
        trace,
    })
}

fn refit(ds: &Dataset, tau: Quantile, sol: Solution, magnitude: f64) -> Solution {
    if magnitude == 0.0 {
        return sol;
    }
    let beta = match vertex_from_subset(ds, &sol.support_ids) {
        Ok(v) => v.beta,
        Err(_) => sol.beta,
    };
    let (objective, _) = compute_score(ds, tau, &beta);
    Solution {
        beta,
        objective,
        ..sol
    }
}
