//! Randomized divide and conquer over the dual arrangement.
//!
//! The search interval on `z_1` starts unbounded. Each round samples a
//! vertex uniformly from those inside it, splits at that vertex's `z_1`, and
//! keeps the side that holds the optimum, until a split plane turns out to
//! contain one.

mod interval;
mod inversions;
mod orders;
mod sampler;
mod split;

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::{Dataset, Quantile};
use crate::error::{QregError, Result};
use crate::geometry::{Arrangement, Vertex};
use crate::objective::{compute_score, objective};
use crate::oracle::{Solution, SolveStats};

pub use interval::SearchInterval;
pub use inversions::inversion_counts;
pub use orders::{boundary_orders, BoundaryOrders};
pub use sampler::{count_vertices, sample_vertex, sample_vertex_2d, COUNT_LIMIT};
pub use split::{
    binary_search_split_2d, compute_interval_2d, reduce_dataset, split_dd, SliceMinimum,
    SplitDecision,
};

use split::{merge_best, split_2d_probe, split_dd_probe};

/// One round of the solver, as written to trace files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub v: f64,
    /// Vertices inside the interval when the round started.
    pub s_in: u64,
    pub decision: &'static str,
    pub best_objective: f64,
    /// Interval after the round.
    pub lo: f64,
    pub hi: f64,
}

/// Rounds allowed before the solver gives up: `64 d ceil(log2 n)`.
pub fn iteration_limit(n: usize, d: usize) -> u64 {
    let log = (n.max(2) as f64).log2().ceil() as u64;
    64 * d as u64 * log
}

pub fn randqr_solve(ds: &Dataset, tau: Quantile, seed: u64) -> Result<Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    solve(ds, tau, &mut rng, None)
}

/// [`randqr_solve`] that also records every round.
pub fn randqr_solve_traced(ds: &Dataset, tau: Quantile, seed: u64) -> Result<(Solution, Vec<TraceRow>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let sol = solve(ds, tau, &mut rng, Some(&mut rows))?;
    Ok((sol, rows))
}

pub fn write_trace_csv(rows: &[TraceRow], writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| QregError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| QregError::Csv(e.to_string()))
}

fn solve(
    ds: &Dataset,
    tau: Quantile,
    rng: &mut ChaCha8Rng,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<Solution> {
    let clock = Instant::now();
    let d = ds.d();
    if d == 1 {
        return solve_1d(ds, tau, clock);
    }
    if !ds.has_intercept() {
        return Err(QregError::InvalidArgument(
            "the randomized solver needs an intercept column".into(),
        ));
    }
    let arr = Arrangement::from_dataset(ds);
    let s = ds.search_index();
    let limit = iteration_limit(ds.n(), d);
    let mut r = SearchInterval::full();
    let mut best: Option<(f64, Vertex)> = None;
    let mut stats = SolveStats::default();

    let found = loop {
        if stats.iterations >= limit {
            return Err(QregError::IterationLimit(format!(
                "no optimal split after {limit} rounds"
            )));
        }
        let Some((p, s_in)) = sampler::sample_counted(&arr, r, rng)? else {
            // every tested v already had its split minimum scored
            break best.map(|(_, v)| v).ok_or_else(|| {
                QregError::Degenerate("arrangement has no vertex to sample".into())
            })?;
        };
        stats.iterations += 1;
        let v = p.beta[s];
        if !r.contains(v) {
            return Err(QregError::Degenerate(format!(
                "sampled vertex at z1 = {v} falls outside ({}, {})",
                r.lo, r.hi
            )));
        }
        stats.vertices_visited += 1;
        let ps = objective(ds, tau, &p.beta);
        merge_best(&mut best, Some((ps, p)));

        let probe = if d == 2 {
            split_2d_probe(ds, tau, v)?
        } else {
            split_dd_probe(ds, tau, v, rng)?
        };
        stats.vertices_visited += probe.visited;
        merge_best(&mut best, probe.best);
        match &probe.decision {
            SplitDecision::Left => r = r.left_of(v),
            SplitDecision::Right => r = r.right_of(v),
            SplitDecision::Optimal(_) => {}
        }
        if let Some(rows) = trace.as_deref_mut() {
            rows.push(TraceRow {
                iteration: stats.iterations,
                v,
                s_in,
                decision: probe.decision.name(),
                best_objective: best.as_ref().map_or(f64::INFINITY, |b| b.0),
                lo: r.lo,
                hi: r.hi,
            });
        }
        if let SplitDecision::Optimal(vx) = probe.decision {
            break vx;
        }
    };

    let (objective, _) = compute_score(ds, tau, &found.beta);
    stats.wall_time = clock.elapsed();
    Ok(Solution {
        beta: found.beta,
        objective,
        support_ids: found.defining_ids,
        stats,
    })
}

/// One parameter: the optimum passes through one point, found by binary
/// search over the sorted candidates `y_i / x_i`.
fn solve_1d(ds: &Dataset, tau: Quantile, clock: Instant) -> Result<Solution> {
    let mut cand: Vec<(f64, usize)> = (0..ds.n())
        .filter(|&i| ds.row(i)[0] != 0.0)
        .map(|i| (ds.y(i) / ds.row(i)[0], i))
        .collect();
    if cand.is_empty() {
        return Err(QregError::Singular { ids: (0..ds.n()).collect() });
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let f = |p: usize| objective(ds, tau, &[cand[p].0]);
    let (mut lo, mut hi) = (0, cand.len() - 1);
    let mut evals = 0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        evals += 2;
        if f(mid) > f(mid + 1) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let beta = vec![cand[lo].0];
    let (objective, _) = compute_score(ds, tau, &beta);
    Ok(Solution {
        beta,
        objective,
        support_ids: vec![cand[lo].1],
        stats: SolveStats {
            vertices_visited: evals,
            iterations: 1,
            wall_time: clock.elapsed(),
        },
    })
}
