use rand::Rng;

use crate::combinations::{binomial, Combinations};
use crate::dataset::{Dataset, Quantile};
use crate::error::{QregError, Result};
use crate::geometry::linalg::solve_in_place;
use crate::geometry::{vertex_from_subset, Vertex};
use crate::objective::{improvement_margin, objective};

/// Where the optimum lies relative to the splitting plane `z_1 = v`.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitDecision {
    Left,
    Right,
    /// The plane holds a global optimum; this vertex attains it.
    Optimal(Vertex),
}

impl SplitDecision {
    pub fn name(&self) -> &'static str {
        match self {
            SplitDecision::Left => "Left",
            SplitDecision::Right => "Right",
            SplitDecision::Optimal(_) => "Optimal",
        }
    }
}

/// Best point on the plane `z_1 = v` of a planar instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMinimum {
    pub score: f64,
    /// Point whose dual carries the minimum.
    pub line: usize,
    /// `[intercept, v]`.
    pub beta: Vec<f64>,
}

/// Outcome of probing around a slice minimum, with the best vertex scored
/// along the way.
#[derive(Debug, Clone)]
pub(crate) struct Probe {
    pub decision: SplitDecision,
    pub best: Option<(f64, Vertex)>,
    pub visited: u64,
}

fn keep_best(best: &mut Option<(f64, Vertex)>, score: f64, v: Vertex) {
    let better = match best {
        None => true,
        Some((s, b)) => score < *s || (score == *s && v.defining_ids < b.defining_ids),
    };
    if better {
        *best = Some((score, v));
    }
}

pub(crate) fn merge_best(into: &mut Option<(f64, Vertex)>, from: Option<(f64, Vertex)>) {
    if let Some((s, v)) = from {
        keep_best(into, s, v);
    }
}

/// Minimizes the loss with the slope fixed to `v` by binary search over the
/// intercepts `y_i - v x_i`, on which the loss is convex.
pub fn binary_search_split_2d(ds: &Dataset, tau: Quantile, v: f64) -> Result<SliceMinimum> {
    if ds.d() != 2 || !ds.has_intercept() {
        return Err(QregError::DimensionMismatch {
            expected: 2,
            found: ds.d(),
        });
    }
    let cand: Vec<f64> = (0..ds.n()).map(|i| ds.y(i) - v * ds.row(i)[1]).collect();
    let mut idx: Vec<usize> = (0..ds.n()).collect();
    idx.sort_by(|&a, &b| cand[a].total_cmp(&cand[b]).then(a.cmp(&b)));
    let f = |p: usize| objective(ds, tau, &[cand[idx[p]], v]);
    let (mut lo, mut hi) = (0, idx.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if f(mid) > f(mid + 1) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let line = idx[lo];
    Ok(SliceMinimum {
        score: f(lo),
        line,
        beta: vec![cand[line], v],
    })
}

/// Decides the side of `z_1 = v` holding the optimum by probing the
/// neighbouring vertices along each line through the slice minimum.
pub fn compute_interval_2d(ds: &Dataset, tau: Quantile, slice: &SliceMinimum) -> Result<SplitDecision> {
    Ok(probe(ds, tau, &slice.beta, slice.score, &[slice.line])?.decision)
}

/// Instance over the remaining parameters once the search coordinate is
/// fixed to `v`: the searched column is dropped and moved into the response.
pub fn reduce_dataset(ds: &Dataset, v: f64) -> Result<Dataset> {
    let d = ds.d();
    if d < 2 {
        return Err(QregError::InvalidArgument("cannot reduce a one-parameter instance".into()));
    }
    let s = ds.search_index();
    let mut design = Vec::with_capacity(ds.n() * (d - 1));
    let mut response = Vec::with_capacity(ds.n());
    for i in 0..ds.n() {
        let row = ds.row(i);
        design.extend(row.iter().enumerate().filter(|&(m, _)| m != s).map(|(_, x)| *x));
        response.push(ds.y(i) - v * row[s]);
    }
    Dataset::from_design(design, response, d - 1, ds.has_intercept())
}

/// Split for three or more parameters: solve the reduced instance on the
/// plane, lift its optimum and probe the lines through it.
pub fn split_dd<R: Rng + ?Sized>(ds: &Dataset, tau: Quantile, v: f64, rng: &mut R) -> Result<SplitDecision> {
    Ok(split_dd_probe(ds, tau, v, rng)?.decision)
}

pub(crate) fn split_dd_probe<R: Rng + ?Sized>(
    ds: &Dataset,
    tau: Quantile,
    v: f64,
    rng: &mut R,
) -> Result<Probe> {
    if ds.d() < 3 {
        return Err(QregError::DimensionMismatch {
            expected: 3,
            found: ds.d(),
        });
    }
    let reduced = reduce_dataset(ds, v)?;
    let sub = super::randqr_solve(&reduced, tau, rng.random())?;
    let s = ds.search_index();
    let mut beta = sub.beta;
    beta.insert(s, v);
    let score = objective(ds, tau, &beta);
    let mut out = probe(ds, tau, &beta, score, &sub.support_ids)?;
    out.visited += sub.stats.vertices_visited;
    Ok(out)
}

pub(crate) fn split_2d_probe(ds: &Dataset, tau: Quantile, v: f64) -> Result<Probe> {
    let slice = binary_search_split_2d(ds, tau, v)?;
    probe(ds, tau, &slice.beta, slice.score, &[slice.line])
}

/// Largest number of slice optima explored before giving up.
const FACE_LIMIT: usize = 512;

/// Points through `point` whose residual vanishes there, plus `support`.
fn passing_through(ds: &Dataset, point: &[f64], support: &[usize]) -> Vec<usize> {
    let scale_of = |i: usize| {
        1.0 + ds.y(i).abs() + ds.row(i).iter().zip(point).map(|(x, b)| (x * b).abs()).sum::<f64>()
    };
    let mut on: Vec<usize> = (0..ds.n())
        .filter(|&i| support.contains(&i) || ds.residual(i, point).abs() <= 1e-11 * scale_of(i))
        .collect();
    on.sort_unstable();
    on
}

/// Direction that keeps the residuals of `keep` at zero, moves point `push`
/// (if any) at unit rate and steps `ds.search_index()` by `search_step`.
fn direction(ds: &Dataset, keep: &[usize], push: Option<(usize, f64)>, search_step: f64) -> Option<Vec<f64>> {
    let d = ds.d();
    let s = ds.search_index();
    let others: Vec<usize> = (0..d).filter(|&m| m != s).collect();
    let k = d - 1;
    let mut a = Vec::with_capacity(k * k);
    let mut rhs = Vec::with_capacity(k);
    for &i in keep {
        let row = ds.row(i);
        a.extend(others.iter().map(|&m| row[m]));
        rhs.push(-search_step * row[s]);
    }
    if let Some((i, rate)) = push {
        let row = ds.row(i);
        a.extend(others.iter().map(|&m| row[m]));
        rhs.push(rate - search_step * row[s]);
    }
    debug_assert_eq!(rhs.len(), k);
    if k > 0 && !solve_in_place(&mut a, &mut rhs, k) {
        return None;
    }
    let mut dir = vec![0.0; d];
    dir[s] = search_step;
    for (p, &m) in others.iter().enumerate() {
        dir[m] = rhs[p];
    }
    Some(dir)
}

/// Nearest point on either side of `point` along `dir` whose residual
/// reaches zero, skipping `skip`.
fn nearest_hits(ds: &Dataset, point: &[f64], dir: &[f64], skip: &[usize]) -> [Option<(f64, usize)>; 2] {
    let delta = 1e-11 * point[ds.search_index()].abs().max(1.0);
    let mut right: Option<(f64, usize)> = None;
    let mut left: Option<(f64, usize)> = None;
    for h in 0..ds.n() {
        if skip.contains(&h) {
            continue;
        }
        let rate: f64 = ds.row(h).iter().zip(dir).map(|(x, q)| x * q).sum();
        if rate == 0.0 {
            continue;
        }
        let step = ds.residual(h, point) / rate;
        if step.abs() <= delta * dir.iter().fold(1.0_f64, |m, q| m.max(q.abs())).recip() {
            continue;
        }
        let slot = if step > 0.0 { &mut right } else { &mut left };
        if slot.is_none_or(|(t, _)| step.abs() < t.abs()) {
            *slot = Some((step, h));
        }
    }
    [right, left]
}

fn vertex_or_point(ds: &Dataset, mut ids: Vec<usize>, point: &[f64], dir: &[f64], step: f64) -> Vertex {
    match vertex_from_subset(ds, &ids) {
        Ok(vx) => vx,
        Err(_) => {
            ids.sort_unstable();
            Vertex {
                beta: point.iter().zip(dir).map(|(p, q)| p + step * q).collect(),
                defining_ids: ids,
            }
        }
    }
}

/// Every vertex of the slice `z_1 = v` that ties with `point`, found by
/// walking the slice arrangement from `point`.
fn slice_optima(
    ds: &Dataset,
    tau: Quantile,
    point: &[f64],
    score: f64,
    support: &[usize],
) -> Result<Vec<(Vec<f64>, Vec<usize>)>> {
    let d = ds.d();
    let margin = improvement_margin(ds, score);
    let first = passing_through(ds, point, support);
    let mut seen: Vec<Vec<usize>> = vec![first.clone()];
    let mut queue = vec![(point.to_vec(), first)];
    let mut done = 0;
    while done < queue.len() {
        let (pt, on) = queue[done].clone();
        done += 1;
        if on.len() < d - 1 || binomial(on.len(), d - 1) > 1e4 {
            return Err(QregError::Degenerate(format!(
                "{} points pass through a slice optimum at z1 = {}",
                on.len(),
                pt[ds.search_index()]
            )));
        }
        for pick in Combinations::new(on.len(), d - 1) {
            let subset: Vec<usize> = pick.iter().map(|&p| on[p]).collect();
            for j in 0..subset.len() {
                let keep: Vec<usize> = subset.iter().enumerate().filter(|&(q, _)| q != j).map(|(_, &i)| i).collect();
                let Some(dir) = direction(ds, &keep, Some((subset[j], 1.0)), 0.0) else {
                    continue;
                };
                for (step, h) in nearest_hits(ds, &pt, &dir, &keep).into_iter().flatten() {
                    let next: Vec<f64> = pt.iter().zip(&dir).map(|(p, q)| p + step * q).collect();
                    if objective(ds, tau, &next) > score + margin {
                        continue;
                    }
                    let mut ids = keep.clone();
                    ids.push(h);
                    let next_on = passing_through(ds, &next, &ids);
                    if seen.contains(&next_on) {
                        continue;
                    }
                    if queue.len() >= FACE_LIMIT {
                        return Err(QregError::Degenerate(format!(
                            "more than {FACE_LIMIT} tied optima on the slice z1 = {}",
                            pt[ds.search_index()]
                        )));
                    }
                    seen.push(next_on.clone());
                    queue.push((next, next_on));
                }
            }
        }
    }
    Ok(queue)
}

/// Follows every line leaving the slice through each optimum of the slice
/// `z_1 = v` (with `point` one of them) to the nearest vertex on either
/// side. A strictly better vertex names the side; otherwise the slice holds
/// a global optimum.
pub(crate) fn probe(
    ds: &Dataset,
    tau: Quantile,
    point: &[f64],
    score: f64,
    support: &[usize],
) -> Result<Probe> {
    let d = ds.d();
    let s = ds.search_index();
    let v = point[s];
    let face = slice_optima(ds, tau, point, score, support)?;

    let margin = improvement_margin(ds, score);
    let mut best: Option<(f64, Vertex)> = None;
    let mut improving: Option<(f64, Vertex)> = None;
    let mut visited = 0;

    for (pt, on) in &face {
        for pick in Combinations::new(on.len(), d - 1) {
            let subset: Vec<usize> = pick.iter().map(|&p| on[p]).collect();
            let Some(dir) = direction(ds, &subset, None, 1.0) else {
                continue;
            };
            for (step, h) in nearest_hits(ds, pt, &dir, &subset).into_iter().flatten() {
                let mut ids = subset.clone();
                ids.push(h);
                let vertex = vertex_or_point(ds, ids, pt, &dir, step);
                visited += 1;
                let nb = objective(ds, tau, &vertex.beta);
                if nb < score - margin {
                    keep_best(&mut improving, nb, vertex.clone());
                }
                keep_best(&mut best, nb, vertex);
            }
        }
    }

    let decision = if let Some((_, vx)) = improving {
        if vx.beta[s] > v {
            SplitDecision::Right
        } else {
            SplitDecision::Left
        }
    } else {
        let at_point = face
            .iter()
            .filter(|(_, on)| on.len() >= d)
            .find_map(|(_, on)| {
                Combinations::new(on.len(), d).find_map(|p| {
                    let ids: Vec<usize> = p.iter().map(|&q| on[q]).collect();
                    vertex_from_subset(ds, &ids).ok()
                })
            });
        match at_point {
            Some(vx) => {
                let sc = objective(ds, tau, &vx.beta);
                keep_best(&mut best, sc, vx.clone());
                SplitDecision::Optimal(vx)
            }
            None => match &best {
                Some((_, vx)) => SplitDecision::Optimal(vx.clone()),
                None => {
                    return Err(QregError::Degenerate(format!(
                        "no vertex reachable from the slice minimum at z1 = {v}"
                    )))
                }
            },
        }
    };
    Ok(Probe {
        decision,
        best,
        visited,
    })
}
