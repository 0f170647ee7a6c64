use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::orders::boundary_orders;
use super::SearchInterval;
use crate::error::{QregError, Result};
use crate::geometry::{crossing, Arrangement, Vertex};

/// Largest `n^(dim-1)` the recursive counter will attempt.
pub const COUNT_LIMIT: f64 = 1e8;

fn guard(arr: &Arrangement) -> Result<()> {
    let work = (arr.len() as f64).powi(arr.dim() as i32 - 1);
    if work > COUNT_LIMIT {
        return Err(QregError::GuardExceeded(format!(
            "counting vertices of {} hyperplanes in dimension {} needs ~{work:.1e} steps",
            arr.len(),
            arr.dim()
        )));
    }
    Ok(())
}

/// Number of vertices of `arr` whose search coordinate lies inside `r`.
///
/// Each vertex is counted once, through its lowest-index hyperplane: the
/// count for hyperplane `i` only looks at hyperplanes after it.
pub fn count_vertices(arr: &Arrangement, r: SearchInterval) -> Result<u64> {
    match arr.dim() {
        1 => Ok(arr.points().into_iter().filter(|&z| r.contains(z)).count() as u64),
        2 => Ok(boundary_orders(&arr.lines()?, r).total),
        _ => {
            guard(arr)?;
            let mut total = 0;
            for i in 0..arr.len() {
                total += count_vertices(&arr.restrict_later(i)?, r)?;
            }
            Ok(total)
        }
    }
}

/// Uniform draw from the vertices of a planar arrangement inside `r`:
/// a line with probability proportional to its inversions, then one of its
/// crossings inside `r` uniformly.
pub fn sample_vertex_2d<R: Rng + ?Sized>(
    arr: &Arrangement,
    r: SearchInterval,
    rng: &mut R,
) -> Result<Option<Vertex>> {
    Ok(sample_counted_2d(arr, r, rng)?.map(|(v, _)| v))
}

fn sample_counted_2d<R: Rng + ?Sized>(
    arr: &Arrangement,
    r: SearchInterval,
    rng: &mut R,
) -> Result<Option<(Vertex, u64)>> {
    let lines = arr.lines()?;
    let orders = boundary_orders(&lines, r);
    if orders.total == 0 {
        return Ok(None);
    }
    let pick = WeightedIndex::new(&orders.per_line_inversions)
        .expect("positive total weight")
        .sample(rng);
    let partners = orders.partners(pick);
    let other = partners[rng.random_range(0..partners.len())];
    let z1 = crossing(&lines[pick], &lines[other]).ok_or(QregError::Parallel)?;
    let v = arr.vertex_at(&[z1, lines[pick].value(z1)], &[pick, other]);
    Ok(Some((v, orders.total)))
}

/// Uniform draw from the vertices of `arr` inside `r`, in any dimension.
pub fn sample_vertex<R: Rng + ?Sized>(
    arr: &Arrangement,
    r: SearchInterval,
    rng: &mut R,
) -> Result<Option<Vertex>> {
    Ok(sample_counted(arr, r, rng)?.map(|(v, _)| v))
}

/// Like [`sample_vertex`], also returning how many vertices lie inside `r`.
pub(crate) fn sample_counted<R: Rng + ?Sized>(
    arr: &Arrangement,
    r: SearchInterval,
    rng: &mut R,
) -> Result<Option<(Vertex, u64)>> {
    match arr.dim() {
        0 | 1 => Err(QregError::InvalidArgument(
            "sampling needs an arrangement of dimension at least 2".into(),
        )),
        2 => sample_counted_2d(arr, r, rng),
        dim => {
            guard(arr)?;
            // each vertex is incident to `dim` hyperplanes, so weights sum
            // to dim times the vertex count
            let mut restricted = Vec::with_capacity(arr.len());
            let mut weights = Vec::with_capacity(arr.len());
            for i in 0..arr.len() {
                let sub = arr.restrict(i)?;
                weights.push(count_vertices(&sub, r)?);
                restricted.push(sub);
            }
            let sum: u64 = weights.iter().sum();
            if sum == 0 {
                return Ok(None);
            }
            let pick = WeightedIndex::new(&weights).expect("positive total weight").sample(rng);
            let Some((v, _)) = sample_counted(&restricted[pick], r, rng)? else {
                return Err(QregError::Degenerate(
                    "restricted arrangement lost its counted vertices".into(),
                ));
            };
            Ok(Some((v, sum / dim as u64)))
        }
    }
}
