//! Reference solvers: exhaustive search over d-point subsets, a local
//! descent over neighbouring vertices in the plane, and exhaustive vertex
//! enumeration inside a search interval.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::combinations::{binomial, Combinations};
use crate::dataset::{Dataset, Quantile};
use crate::error::{QregError, Result};
use crate::geometry::{crossing, vertex_from_subset, Arrangement, Line2, Vertex};
use crate::objective::{
    compute_score, improvement_margin, objective, Move, ResidualPartition, TrackedAggregates,
};
use crate::randqr::SearchInterval;

/// Largest `n^d` the exhaustive solver will attempt.
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub vertices_visited: u64,
    pub iterations: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub beta: Vec<f64>,
    pub objective: f64,
    /// Sorted ids of the `d` points the fitted hyperplane passes through.
    pub support_ids: Vec<usize>,
    pub stats: SolveStats,
}

/// Exact optimum by scoring the hyperplane through every d-point subset.
/// Ties go to the lexicographically smallest support.
pub fn brute_force_solve(ds: &Dataset, tau: Quantile) -> Result<Solution> {
    let start = Instant::now();
    let (n, d) = (ds.n(), ds.d());
    let work = (n as f64).powi(d as i32);
    if work > BRUTE_FORCE_LIMIT {
        return Err(QregError::GuardExceeded(format!(
            "exhaustive search over n^d = {work:.3e} subsets exceeds {BRUTE_FORCE_LIMIT:e}"
        )));
    }
    let mut best: Option<(f64, Vertex)> = None;
    let mut visited = 0u64;
    for ids in Combinations::new(n, d) {
        let Ok(v) = vertex_from_subset(ds, &ids) else { continue };
        visited += 1;
        let score = objective(ds, tau, &v.beta);
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, v));
        }
    }
    let (_, v) = best.ok_or_else(|| {
        QregError::Degenerate("every d-point subset is singular".into())
    })?;
    let (objective, _) = compute_score(ds, tau, &v.beta);
    Ok(Solution {
        beta: v.beta,
        objective,
        support_ids: v.defining_ids,
        stats: SolveStats {
            vertices_visited: visited,
            iterations: visited,
            wall_time: start.elapsed(),
        },
    })
}

pub(crate) fn dual_lines(ds: &Dataset) -> Result<Vec<Line2>> {
    if ds.d() != 2 {
        return Err(QregError::DimensionMismatch {
            expected: 2,
            found: ds.d(),
        });
    }
    if !ds.has_intercept() {
        return Err(QregError::InvalidArgument(
            "planar solvers need an intercept column".into(),
        ));
    }
    Ok((0..ds.n()).map(|i| Line2::of_point(ds.row(i)[1], ds.y(i))).collect())
}

/// Walks from vertex to neighbouring vertex in the planar dual arrangement,
/// always taking the largest decrease, until no neighbour improves.
pub fn neighbor_descent_solve_2d(
    ds: &Dataset,
    tau: Quantile,
    start: Option<(usize, usize)>,
) -> Result<Solution> {
    let clock = Instant::now();
    let lines = dual_lines(ds)?;
    let n = lines.len();
    let (mut a, mut b) = match start {
        Some((a, b)) => {
            if a == b || a >= n || b >= n || crossing(&lines[a], &lines[b]).is_none() {
                return Err(QregError::Singular {
                    ids: vec![a.min(b), a.max(b)],
                });
            }
            (a.min(b), a.max(b))
        }
        None => first_crossing_pair(&lines).ok_or(QregError::Parallel)?,
    };

    let mut z1 = crossing(&lines[a], &lines[b]).unwrap();
    let beta = [lines[a].value(z1), z1];
    let mut part = ResidualPartition::by_sign(ds, &beta);
    force_plus(&mut part, &[a, b]);
    let mut tracked = TrackedAggregates::new(ds, part);
    let mut current = tracked.score(tau, &beta);
    let mut stats = SolveStats::default();

    loop {
        // (score, support, z1, moves)
        let mut best: Option<(f64, [usize; 2], f64, Vec<Move>)> = None;
        for (on, off) in [(a, b), (b, a)] {
            for right in [false, true] {
                let Some((c, t)) = nearest_along(&lines, on, off, z1, right) else { continue };
                stats.vertices_visited += 1;
                // `off` leaves the vertex; it ends up above `on` or below it
                let off_above = if right {
                    lines[off].rate < lines[on].rate
                } else {
                    lines[off].rate > lines[on].rate
                };
                let part = tracked.partition();
                let moves = match (off_above, part.is_plus(c)) {
                    (true, true) => vec![],
                    (true, false) => vec![Move::Enter(c)],
                    (false, true) => vec![Move::Leave(off)],
                    (false, false) => vec![Move::Swap(off, c)],
                };
                let mut agg = tracked.aggregates().clone();
                for &mv in &moves {
                    agg.apply_unchecked(mv, ds);
                }
                let nb = [lines[on].value(t), t];
                let score = crate::objective::score_from_aggregates(&agg, tau, &nb);
                let support = [on.min(c), on.max(c)];
                let better = match &best {
                    None => true,
                    Some((s, sup, ..)) => score < *s || (score == *s && support < *sup),
                };
                if better {
                    best = Some((score, support, t, moves));
                }
            }
        }
        match best {
            Some((score, support, t, moves))
                if score < current - improvement_margin(ds, current) =>
            {
                for mv in moves {
                    tracked.apply(mv, ds)?;
                }
                [a, b] = support;
                z1 = t;
                current = score;
                stats.iterations += 1;
            }
            _ => break,
        }
    }

    let v = vertex_from_subset(ds, &[a, b])?;
    let (objective, _) = compute_score(ds, tau, &v.beta);
    stats.wall_time = clock.elapsed();
    Ok(Solution {
        beta: v.beta,
        objective,
        support_ids: v.defining_ids,
        stats,
    })
}

fn first_crossing_pair(lines: &[Line2]) -> Option<(usize, usize)> {
    let n = lines.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| crossing(&lines[i], &lines[j]).is_some())
}

/// Nearest crossing of line `on` with a line other than `off`, strictly to
/// the right (or left) of `z1`.
fn nearest_along(lines: &[Line2], on: usize, off: usize, z1: f64, right: bool) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (c, line) in lines.iter().enumerate() {
        if c == on || c == off {
            continue;
        }
        let Some(t) = crossing(&lines[on], line) else { continue };
        let ahead = if right { t > z1 } else { t < z1 };
        let nearer = best.is_none_or(|(_, b)| if right { t < b } else { t > b });
        if ahead && nearer {
            best = Some((c, t));
        }
    }
    best
}

pub(crate) fn force_plus(part: &mut ResidualPartition, ids: &[usize]) {
    let mut member: Vec<bool> = (0..part.len()).map(|i| part.is_plus(i)).collect();
    for &i in ids {
        member[i] = true;
    }
    *part = ResidualPartition::from_membership(member);
}

/// Every vertex of `arr` whose search coordinate lies strictly inside `r`,
/// keyed by defining ids. Exhaustive over `dim`-subsets of hyperplanes.
pub fn enumerate_vertices_in_interval(arr: &Arrangement, r: SearchInterval) -> Result<Vec<Vertex>> {
    let k = arr.dim();
    if binomial(arr.len(), k) > BRUTE_FORCE_LIMIT {
        return Err(QregError::GuardExceeded(format!(
            "enumerating C({}, {k}) vertex candidates",
            arr.len()
        )));
    }
    let mut found: BTreeMap<Vec<usize>, Vertex> = BTreeMap::new();
    if k == 1 {
        for (i, z) in arr.points().into_iter().enumerate() {
            if r.contains(z) {
                let v = arr.vertex_at(&[z], &[i]);
                found.entry(v.defining_ids.clone()).or_insert(v);
            }
        }
    } else {
        for members in Combinations::new(arr.len(), k) {
            let Some(local) = arr.intersect(&members) else { continue };
            if r.contains(local[0]) {
                let v = arr.vertex_at(&local, &members);
                found.entry(v.defining_ids.clone()).or_insert(v);
            }
        }
    }
    Ok(found.into_values().collect())
}
