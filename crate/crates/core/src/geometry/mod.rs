//! Point/hyperplane duality and the arrangement primitives shared by the
//! solvers.
//!
//! A data point `p` with design row `X_p` and response `y_p` maps to the dual
//! hyperplane `X_p . z = y_p`. A parameter vector `beta` is a point in the
//! same space, so `p` lies on the primal hyperplane of `beta` exactly when
//! `beta` lies on the dual hyperplane of `p`. Dual coordinates are listed with
//! the slopes first and the intercept last (`z_1 .. z_{d-1}, z_d`); vertices
//! carry their coordinates in design order (`beta[0]` is the intercept).

mod arrangement;
mod lines;
pub(crate) mod linalg;

pub use arrangement::{Arrangement, Elimination};
pub use lines::{crossing, Line2};

use crate::dataset::Dataset;
use crate::error::{QregError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DualHyperplane {
    /// Coefficients over the arrangement's active coordinates.
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    /// Original point indices whose duals were intersected to produce this
    /// hyperplane, ascending.
    pub source_ids: Vec<usize>,
}

impl DualHyperplane {
    pub fn eval(&self, z: &[f64]) -> f64 {
        self.coeffs.iter().zip(z).map(|(c, v)| c * v).sum::<f64>() - self.rhs
    }

    pub(crate) fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

/// A dual-space vertex: the parameter vector of a primal hyperplane passing
/// through the `defining_ids` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    /// Parameters in design order, intercept first.
    pub beta: Vec<f64>,
    /// Sorted point ids whose duals meet here.
    pub defining_ids: Vec<usize>,
}

impl Vertex {
    /// Coordinates in dual order (`z_1 .. z_d`), for a model with intercept.
    pub fn dual_coords(&self) -> Vec<f64> {
        let mut z = self.beta[1..].to_vec();
        z.push(self.beta[0]);
        z
    }
}

/// Dual hyperplane of point `i`: `z_d + sum_m x_m z_m = y` when the dataset
/// has an intercept.
pub fn dual_of_point(ds: &Dataset, i: usize) -> DualHyperplane {
    let row = ds.row(i);
    let coeffs = if ds.has_intercept() {
        row[1..].iter().chain(std::iter::once(&row[0])).copied().collect()
    } else {
        row.to_vec()
    };
    DualHyperplane {
        coeffs,
        rhs: ds.y(i),
        source_ids: vec![i],
    }
}

/// Parameters of the hyperplane through the `d` points `ids`.
pub fn vertex_from_subset(ds: &Dataset, ids: &[usize]) -> Result<Vertex> {
    let d = ds.d();
    if ids.len() != d {
        return Err(QregError::DimensionMismatch {
            expected: d,
            found: ids.len(),
        });
    }
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.last().is_some_and(|&i| i >= ds.n()) {
        return Err(QregError::InvalidArgument(format!(
            "subset {ids:?} must hold {d} distinct indices below {}",
            ds.n()
        )));
    }
    let mut a = Vec::with_capacity(d * d);
    let mut b = Vec::with_capacity(d);
    for &i in &sorted {
        a.extend_from_slice(ds.row(i));
        b.push(ds.y(i));
    }
    if !linalg::solve_in_place(&mut a, &mut b, d) {
        return Err(QregError::Singular { ids: sorted });
    }
    Ok(Vertex {
        beta: b,
        defining_ids: sorted,
    })
}

/// Intersection `(z_1, z_2)` of two lines of a planar arrangement.
pub fn intersect_2d(a: &DualHyperplane, b: &DualHyperplane) -> Result<(f64, f64)> {
    if a.coeffs.len() != 2 || b.coeffs.len() != 2 {
        return Err(QregError::DimensionMismatch {
            expected: 2,
            found: a.coeffs.len().max(b.coeffs.len()),
        });
    }
    let mut m = [a.coeffs[0], a.coeffs[1], b.coeffs[0], b.coeffs[1]];
    let mut r = [a.rhs, b.rhs];
    if linalg::solve_in_place(&mut m, &mut r, 2) {
        Ok((r[0], r[1]))
    } else {
        Err(QregError::Parallel)
    }
}
