//! Sweeping the k-level of a planar line arrangement, and the planar solver
//! that scores every vertex on the levels where the optimum must lie.
//!
//! Levels count from the top: a point is on level `k` when at most `k - 1`
//! lines pass strictly above it and at most `n - k` strictly below.

mod tournament;

use std::io::Write;
use std::time::Instant;

use crate::dataset::{Dataset, Quantile};
use crate::error::{QregError, Result};
use crate::geometry::{crossing, vertex_from_subset, Arrangement, Line2, Vertex};
use crate::objective::{compute_score, Move, ResidualPartition, TrackedAggregates};
use crate::oracle::{dual_lines, Solution, SolveStats};
use tournament::Tournament;

/// Relative gap below which two consecutive level vertices are treated as
/// coincident.
pub const COINCIDENCE_EPS: f64 = 1e-12;

/// One vertex of the level: the level line `old` meets `new` at `z1` and
/// `new` carries the level onward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEvent {
    pub z1: f64,
    pub z2: f64,
    pub old: usize,
    pub new: usize,
    /// `new` reached the level from above (and `old` continues above it).
    pub from_above: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KLevelPath {
    pub k: usize,
    pub vertices: Vec<Vertex>,
    /// `(old, new)` line pair swapped at each vertex.
    pub swaps: Vec<(usize, usize)>,
}

/// Streams the vertices of level `k` in increasing `z1`.
///
/// The lines strictly above the level line and those strictly below are kept
/// in two kinetic tournaments, so the next level vertex is always a crossing
/// with the lowest line above or the highest line below.
pub struct LevelSweep<'a> {
    lines: &'a [Line2],
    above: Tournament,
    below: Tournament,
    level: usize,
    t: f64,
    /// `z1` of the last level vertex.
    last: f64,
    failed: bool,
}

impl<'a> LevelSweep<'a> {
    pub fn new(lines: &'a [Line2], k: usize) -> Result<Self> {
        let n = lines.len();
        if k == 0 || k > n {
            return Err(QregError::InvalidArgument(format!(
                "level {k} outside 1..={n}"
            )));
        }
        let order = order_at_minus_infinity(lines);
        let t = f64::NEG_INFINITY;
        let mut above = Tournament::new(n, true);
        let mut below = Tournament::new(n, false);
        above.build(lines, &order[..k - 1], t);
        below.build(lines, &order[k..], t);
        Ok(LevelSweep {
            lines,
            above,
            below,
            level: order[k - 1],
            t,
            last: t,
            failed: false,
        })
    }

    /// Line carrying the level just right of the last emitted vertex.
    pub fn level_line(&self) -> usize {
        self.level
    }

    /// Whether line `i` runs above the level just right of the last emitted
    /// vertex.
    pub fn is_above(&self, i: usize) -> bool {
        self.above.contains(i)
    }

    fn step(&mut self) -> Result<Option<LevelEvent>> {
        let lines = self.lines;
        loop {
            let t = self.t;
            let level_line = &lines[self.level];
            let hit = |w: Option<usize>| -> f64 {
                match w.and_then(|m| crossing(level_line, &lines[m])) {
                    Some(c) if c > t => c,
                    _ => f64::INFINITY,
                }
            };
            let c_above = hit(self.above.winner());
            let c_below = hit(self.below.winner());
            let c_level = c_above.min(c_below);
            let (ta, tb) = (self.above.next_change(), self.below.next_change());

            if ta.min(tb) < c_level {
                if ta <= tb {
                    self.t = ta;
                    self.above.advance(lines, ta);
                } else {
                    self.t = tb;
                    self.below.advance(lines, tb);
                }
                continue;
            }
            if c_level == f64::INFINITY {
                return Ok(None);
            }

            let old = self.level;
            let from_above = c_above <= c_below;
            let new = if from_above {
                let m = self.above.winner().unwrap();
                self.above.remove(lines, m, c_level);
                self.above.insert(lines, old, c_level);
                m
            } else {
                let m = self.below.winner().unwrap();
                self.below.remove(lines, m, c_level);
                self.below.insert(lines, old, c_level);
                m
            };
            let prev = self.last;
            self.t = c_level;
            self.last = c_level;
            self.level = new;
            if prev.is_finite() && c_level - prev <= COINCIDENCE_EPS * c_level.abs().max(1.0) {
                return Err(QregError::Degenerate(format!(
                    "coincident level vertices near z1 = {c_level}"
                )));
            }
            return Ok(Some(LevelEvent {
                z1: c_level,
                z2: lines[old].value(c_level),
                old,
                new,
                from_above,
            }));
        }
    }
}

impl Iterator for LevelSweep<'_> {
    type Item = Result<LevelEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let out = self.step();
        if out.is_err() {
            self.failed = true;
        }
        out.transpose()
    }
}

/// Line ids top to bottom as `z1 -> -inf`.
pub(crate) fn order_at_minus_infinity(lines: &[Line2]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&i, &j| {
        lines[j]
            .rate
            .total_cmp(&lines[i].rate)
            .then(lines[j].offset.total_cmp(&lines[i].offset))
            .then(i.cmp(&j))
    });
    order
}

/// The full vertex sequence of level `k` of a planar arrangement.
pub fn klevel_sweep(arr: &Arrangement, k: usize) -> Result<KLevelPath> {
    let lines = arr.lines()?;
    let mut path = KLevelPath {
        k,
        vertices: Vec::new(),
        swaps: Vec::new(),
    };
    for e in LevelSweep::new(&lines, k)? {
        let e = e?;
        path.vertices.push(arr.vertex_at(&[e.z1, e.z2], &[e.old, e.new]));
        path.swaps.push((e.old, e.new));
    }
    Ok(path)
}

/// Top-counted levels on which an optimal vertex for quantile `tau` lies.
pub fn candidate_levels(n: usize, tau: Quantile) -> Vec<usize> {
    let tn = tau.value() * n as f64;
    let from_bottom = [(tn - 1e-9).ceil(), (tn + 1e-9).floor() + 1.0];
    let mut levels: Vec<usize> = from_bottom
        .iter()
        .filter(|&&kb| kb >= 1.0 && kb <= n as f64)
        .map(|&kb| n + 1 - kb as usize)
        .collect();
    levels.sort_unstable();
    levels.dedup();
    levels
}

/// Walks level `k` scoring each vertex incrementally. `visit` receives the
/// event, its parameters `[intercept, slope]` and the aggregate score.
pub fn walk_level(
    ds: &Dataset,
    tau: Quantile,
    k: usize,
    mut visit: impl FnMut(&LevelEvent, [f64; 2], f64),
) -> Result<u64> {
    let lines = dual_lines(ds)?;
    let mut tracked: Option<TrackedAggregates> = None;
    let mut prev: Option<LevelEvent> = None;
    let mut count = 0;
    let mut sweep = LevelSweep::new(&lines, k)?;
    while let Some(e) = sweep.next() {
        let e = e?;
        let beta = [e.z2, e.z1];
        match (&mut tracked, prev) {
            (Some(tr), Some(p)) => {
                let leave = (!p.from_above).then_some(p.old);
                let enter = (!e.from_above).then_some(e.new);
                let mv = match (leave, enter) {
                    (Some(s), Some(t)) => Some(Move::Swap(s, t)),
                    (Some(s), None) => Some(Move::Leave(s)),
                    (None, Some(t)) => Some(Move::Enter(t)),
                    (None, None) => None,
                };
                if let Some(mv) = mv {
                    tr.apply(mv, ds).map_err(|err| {
                        QregError::Degenerate(format!("level walk out of step at z1 = {}: {err}", e.z1))
                    })?;
                }
            }
            _ => {
                // lines above the vertex plus the two through it
                let member = (0..lines.len())
                    .map(|i| i == e.old || i == e.new || sweep.is_above(i))
                    .collect();
                let part = ResidualPartition::from_membership(member);
                tracked = Some(TrackedAggregates::new(ds, part));
            }
        }
        let score = tracked.as_ref().unwrap().score(tau, &beta);
        visit(&e, beta, score);
        prev = Some(e);
        count += 1;
    }
    Ok(count)
}

/// Planar solver: the minimum over every vertex of the candidate levels.
pub fn qreg2d_solve(ds: &Dataset, tau: Quantile) -> Result<Solution> {
    let clock = Instant::now();
    dual_lines(ds)?;
    let mut stats = SolveStats::default();
    let mut best: Option<(f64, [usize; 2])> = None;
    for k in candidate_levels(ds.n(), tau) {
        stats.iterations += 1;
        stats.vertices_visited += walk_level(ds, tau, k, |e, _, score| {
            if best.is_none_or(|(b, _)| score < b) {
                best = Some((score, [e.old, e.new]));
            }
        })?;
    }
    let (_, pair) = best.ok_or(QregError::Parallel)?;
    let v = vertex_from_subset(ds, &pair)?;
    let (objective, _) = compute_score(ds, tau, &v.beta);
    stats.wall_time = clock.elapsed();
    Ok(Solution {
        beta: v.beta,
        objective,
        support_ids: v.defining_ids,
        stats,
    })
}

/// Writes the level polyline as `z1,z2,line_a,line_b` rows.
pub fn write_level_csv(ds: &Dataset, k: usize, writer: impl Write) -> Result<()> {
    let lines = dual_lines(ds)?;
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| QregError::Csv(e.to_string());
    w.write_record(["z1", "z2", "line_a", "line_b"]).map_err(csv_err)?;
    for e in LevelSweep::new(&lines, k)? {
        let e = e?;
        w.write_record([e.z1.to_string(), e.z2.to_string(), e.old.to_string(), e.new.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| QregError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::objective;
    use crate::oracle::brute_force_solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Reference sweep: at each vertex scan all lines for the nearest
    /// crossing of the level line to the right.
    fn scan_sweep(lines: &[Line2], k: usize) -> Vec<LevelEvent> {
        let order = order_at_minus_infinity(lines);
        let mut level = order[k - 1];
        let mut t = f64::NEG_INFINITY;
        let mut out = Vec::new();
        loop {
            let next = (0..lines.len())
                .filter(|&j| j != level)
                .filter_map(|j| crossing(&lines[level], &lines[j]).map(|c| (c, j)))
                .filter(|&(c, _)| c > t)
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let Some((c, j)) = next else { break };
            out.push(LevelEvent {
                z1: c,
                z2: lines[level].value(c),
                old: level,
                new: j,
                from_above: lines[j].rate > lines[level].rate,
            });
            level = j;
            t = c;
        }
        out
    }

    fn random_lines(rng: &mut ChaCha8Rng, n: usize) -> Vec<Line2> {
        (0..n)
            .map(|_| Line2::of_point(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
            .collect()
    }

    fn random_dataset(rng: &mut ChaCha8Rng, n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-10.0..10.0)]).collect();
        let y = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        Dataset::new(&rows, y).unwrap()
    }

    /// Strictly-above and strictly-below counts at a vertex of `a` and `b`.
    fn counts_at(lines: &[Line2], z1: f64, a: usize, b: usize) -> (usize, usize) {
        let z2 = lines[a].value(z1);
        let mut counts = (0, 0);
        for (j, l) in lines.iter().enumerate() {
            if j == a || j == b {
                continue;
            }
            let v = l.value(z1);
            let tol = 1e-9 * (1.0 + v.abs() + z2.abs());
            if v > z2 + tol {
                counts.0 += 1;
            } else if v < z2 - tol {
                counts.1 += 1;
            }
        }
        counts
    }

    fn collect(lines: &[Line2], k: usize) -> Vec<LevelEvent> {
        LevelSweep::new(lines, k).unwrap().map(|e| e.unwrap()).collect()
    }

    #[test]
    fn two_lines_single_vertex() {
        let lines = [Line2::of_point(1.0, 0.0), Line2::of_point(-1.0, 0.0)];
        let path = collect(&lines, 1);
        assert_eq!(path.len(), 1);
        assert_eq!((path[0].z1, path[0].z2), (0.0, 0.0));
        assert_eq!((path[0].old, path[0].new), (0, 1));
    }

    #[test]
    fn kinetic_sweep_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.random_range(2..=50);
            let lines = random_lines(&mut rng, n);
            for k in [1, n.div_ceil(3), n.div_ceil(2), n] {
                assert_eq!(collect(&lines, k), scan_sweep(&lines, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn running_example_level_four() {
        let ds = Dataset::running_example();
        let lines = dual_lines(&ds).unwrap();
        let path = collect(&lines, 4);
        let mut on_level = Vec::new();
        for i in 0..7 {
            for j in i + 1..7 {
                let z1 = crossing(&lines[i], &lines[j]).unwrap();
                let (above, below) = counts_at(&lines, z1, i, j);
                if above <= 3 && below <= 3 {
                    on_level.push((i, j));
                }
            }
        }
        let mut emitted: Vec<(usize, usize)> =
            path.iter().map(|e| (e.old.min(e.new), e.old.max(e.new))).collect();
        emitted.sort_unstable();
        assert_eq!(emitted, on_level);
        assert!(path.windows(2).all(|w| w[0].z1 < w[1].z1 && w[0].new == w[1].old));
    }

    #[test]
    fn bottom_level_is_lower_envelope() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lines = random_lines(&mut rng, 30);
        let path = collect(&lines, 30);
        assert!(path.len() <= 29);
        for e in &path {
            for l in &lines {
                assert!(l.value(e.z1) >= e.z2 - 1e-9 * (1.0 + e.z2.abs()));
            }
        }
        // between vertices the envelope line is the lowest
        for w in path.windows(2) {
            let mid = 0.5 * (w[0].z1 + w[1].z1);
            let low = lines.iter().map(|l| l.value(mid)).fold(f64::INFINITY, f64::min);
            assert_eq!(lines[w[0].new].value(mid), low);
        }
    }

    #[test]
    fn membership_predicate_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let n = rng.random_range(2..=64);
            let lines = random_lines(&mut rng, n);
            for k in [1, n.div_ceil(4), n.div_ceil(2), n] {
                for e in collect(&lines, k) {
                    let (above, below) = counts_at(&lines, e.z1, e.old, e.new);
                    assert!(above < k && below <= n - k, "n={n} k={k} {e:?}");
                    assert_eq!(above + below, n - 2);
                }
            }
        }
    }

    #[test]
    fn klevel_sweep_lifts_vertices() {
        let ds = Dataset::running_example();
        let path = klevel_sweep(&Arrangement::from_dataset(&ds), 4).unwrap();
        assert_eq!(path.vertices.len(), path.swaps.len());
        for v in &path.vertices {
            let expect = vertex_from_subset(&ds, &v.defining_ids).unwrap();
            assert!((v.beta[0] - expect.beta[0]).abs() < 1e-9);
            assert!((v.beta[1] - expect.beta[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn levels_for_quantiles() {
        assert_eq!(candidate_levels(7, Quantile::new(0.5).unwrap()), vec![4]);
        assert_eq!(candidate_levels(8, Quantile::new(0.5).unwrap()), vec![4, 5]);
        assert_eq!(candidate_levels(10, Quantile::new(0.1).unwrap()), vec![9, 10]);
        assert_eq!(candidate_levels(10, Quantile::new(0.9).unwrap()), vec![1, 2]);
        assert_eq!(candidate_levels(10, Quantile::new(0.95).unwrap()), vec![1]);
    }

    #[test]
    fn solver_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for trial in 0..200 {
            let n = rng.random_range(3..=60);
            let ds = random_dataset(&mut rng, n);
            let tau = Quantile::new([0.1, 0.25, 0.5, 0.9][trial % 4]).unwrap();
            let oracle = brute_force_solve(&ds, tau).unwrap();
            let sol = qreg2d_solve(&ds, tau).unwrap();
            let tol = 1e-9 * oracle.objective.abs().max(1.0);
            assert!((sol.objective - oracle.objective).abs() <= tol, "trial {trial}");
        }
    }

    #[test]
    fn running_example_and_exact_fit() {
        let ds = Dataset::running_example();
        let tau = Quantile::new(0.5).unwrap();
        let sol = qreg2d_solve(&ds, tau).unwrap();
        assert!((sol.objective - brute_force_solve(&ds, tau).unwrap().objective).abs() < 1e-12);

        let rows: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64 * 0.7 - 2.0]).collect();
        let y = rows.iter().map(|r| 3.0 - 2.0 * r[0]).collect();
        let line = Dataset::new(&rows, y).unwrap();
        for t in [0.2, 0.5, 0.8] {
            let tau = Quantile::new(t).unwrap();
            let r = qreg2d_solve(&crate::dataset::perturb(&line, 1e-9, 3).unwrap(), tau);
            assert!(r.is_ok(), "{r:?}");
        }
    }

    #[test]
    fn incremental_scores_track_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ds = random_dataset(&mut rng, 400);
        let tau = Quantile::new(0.5).unwrap();
        let mut idx = 0;
        let mut checked = 0;
        walk_level(&ds, tau, 200, |_, beta, score| {
            if idx % 64 == 0 {
                let direct = objective(&ds, tau, &beta);
                assert!((score - direct).abs() <= 1e-8 * direct.abs().max(1.0));
                checked += 1;
            }
            idx += 1;
        })
        .unwrap();
        assert!(checked > 5);
    }

    #[test]
    fn dump_has_one_row_per_vertex() {
        let ds = Dataset::running_example();
        let mut buf = Vec::new();
        write_level_csv(&ds, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines = dual_lines(&ds).unwrap();
        assert_eq!(text.lines().count(), 1 + collect(&lines, 4).len());
        assert!(text.starts_with("z1,z2,line_a,line_b\n"));
    }
}
