use super::linalg::{self, SINGULAR_EPS};
use super::{dual_of_point, DualHyperplane, Line2, Vertex};
use crate::dataset::Dataset;
use crate::error::{QregError, Result};

/// Records `z[coord] = constant + sum(c * z[k] for (k, c) in terms)`, where
/// every `k` was still active when `coord` was eliminated.
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub coord: usize,
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

/// Hyperplanes over a subset of the dual coordinates. Local coordinate 0 is
/// always the search coordinate `z_1`.
#[derive(Debug, Clone)]
pub struct Arrangement {
    hyperplanes: Vec<DualHyperplane>,
    active: Vec<usize>,
    eliminations: Vec<Elimination>,
    beta_index: Vec<usize>,
    degenerate: usize,
}

impl Arrangement {
    pub fn from_dataset(ds: &Dataset) -> Self {
        let d = ds.d();
        let beta_index = if ds.has_intercept() {
            (1..d).chain(std::iter::once(0)).collect()
        } else {
            (0..d).collect()
        };
        Arrangement {
            hyperplanes: (0..ds.n()).map(|i| dual_of_point(ds, i)).collect(),
            active: (0..d).collect(),
            eliminations: Vec::new(),
            beta_index,
            degenerate: 0,
        }
    }

    /// Arrangement of arbitrary hyperplanes in `dim` dual coordinates that map
    /// one-to-one onto parameters.
    pub fn from_hyperplanes(dim: usize, hyperplanes: Vec<DualHyperplane>) -> Result<Self> {
        if dim == 0 {
            return Err(QregError::InvalidArgument("arrangement dimension must be at least 1".into()));
        }
        if let Some(h) = hyperplanes.iter().find(|h| h.coeffs.len() != dim) {
            return Err(QregError::DimensionMismatch {
                expected: dim,
                found: h.coeffs.len(),
            });
        }
        Ok(Arrangement {
            hyperplanes,
            active: (0..dim).collect(),
            eliminations: Vec::new(),
            beta_index: (0..dim).collect(),
            degenerate: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.active.len()
    }

    pub fn full_dim(&self) -> usize {
        self.beta_index.len()
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[DualHyperplane] {
        &self.hyperplanes
    }

    pub fn eliminations(&self) -> &[Elimination] {
        &self.eliminations
    }

    /// Rows dropped by restrictions because substitution left them without
    /// any non-zero coefficient.
    pub fn degenerate_count(&self) -> usize {
        self.degenerate
    }

    /// Substitutes hyperplane `onto` into all the others, eliminating its
    /// largest-magnitude non-search coordinate.
    pub fn restrict(&self, onto: usize) -> Result<Arrangement> {
        self.restrict_filtered(onto, |_| true)
    }

    /// Like [`restrict`](Self::restrict) but keeps only hyperplanes with an
    /// index greater than `onto`.
    pub fn restrict_later(&self, onto: usize) -> Result<Arrangement> {
        self.restrict_filtered(onto, |j| j > onto)
    }

    fn restrict_filtered(&self, onto: usize, keep: impl Fn(usize) -> bool) -> Result<Arrangement> {
        let dim = self.dim();
        if dim < 2 {
            return Err(QregError::InvalidArgument("cannot restrict a 1-dimensional arrangement".into()));
        }
        let h = self.hyperplanes.get(onto).ok_or_else(|| {
            QregError::InvalidArgument(format!("hyperplane {onto} out of range ({})", self.len()))
        })?;
        let (pivot, pabs) = (1..dim)
            .map(|k| (k, h.coeffs[k].abs()))
            .fold((1, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pabs <= SINGULAR_EPS * h.max_abs_coeff() || pabs == 0.0 {
            return Err(QregError::Degenerate(format!(
                "hyperplane {onto} is orthogonal to the search coordinate"
            )));
        }
        let cp = h.coeffs[pivot];
        let elimination = Elimination {
            coord: self.active[pivot],
            constant: h.rhs / cp,
            terms: (0..dim)
                .filter(|&k| k != pivot)
                .map(|k| (self.active[k], -h.coeffs[k] / cp))
                .collect(),
        };

        let mut degenerate = self.degenerate;
        let mut hyperplanes = Vec::with_capacity(self.len().saturating_sub(1));
        for (j, g) in self.hyperplanes.iter().enumerate() {
            if j == onto || !keep(j) {
                continue;
            }
            let f = g.coeffs[pivot] / cp;
            let coeffs: Vec<f64> = (0..dim)
                .filter(|&k| k != pivot)
                .map(|k| g.coeffs[k] - f * h.coeffs[k])
                .collect();
            let scale = g.max_abs_coeff().max(f.abs() * h.max_abs_coeff());
            if coeffs.iter().all(|c| c.abs() <= SINGULAR_EPS * scale) {
                degenerate += 1;
                continue;
            }
            let mut source_ids = g.source_ids.clone();
            source_ids.extend_from_slice(&h.source_ids);
            source_ids.sort_unstable();
            source_ids.dedup();
            hyperplanes.push(DualHyperplane {
                coeffs,
                rhs: g.rhs - f * h.rhs,
                source_ids,
            });
        }

        let mut active = self.active.clone();
        active.remove(pivot);
        let mut eliminations = self.eliminations.clone();
        eliminations.push(elimination);
        Ok(Arrangement {
            hyperplanes,
            active,
            eliminations,
            beta_index: self.beta_index.clone(),
            degenerate,
        })
    }

    /// Full dual coordinates of the point with local coordinates `local`.
    pub fn lift(&self, local: &[f64]) -> Vec<f64> {
        debug_assert_eq!(local.len(), self.dim());
        let mut z = vec![f64::NAN; self.full_dim()];
        for (k, &c) in self.active.iter().enumerate() {
            z[c] = local[k];
        }
        for e in self.eliminations.iter().rev() {
            z[e.coord] = e.constant + e.terms.iter().map(|&(k, c)| c * z[k]).sum::<f64>();
        }
        z
    }

    /// Reorders full dual coordinates into a parameter vector.
    pub fn to_beta(&self, z: &[f64]) -> Vec<f64> {
        let mut beta = vec![0.0; z.len()];
        for (m, &b) in self.beta_index.iter().enumerate() {
            beta[b] = z[m];
        }
        beta
    }

    /// Lifts `local` and tags it with the union of the given hyperplanes'
    /// source ids.
    pub fn vertex_at(&self, local: &[f64], members: &[usize]) -> Vertex {
        let mut ids: Vec<usize> = members
            .iter()
            .flat_map(|&i| self.hyperplanes[i].source_ids.iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        Vertex {
            beta: self.to_beta(&self.lift(local)),
            defining_ids: ids,
        }
    }

    /// Local coordinates where the `dim` hyperplanes `members` meet, or
    /// `None` when they do not meet in a single point.
    pub fn intersect(&self, members: &[usize]) -> Option<Vec<f64>> {
        let k = self.dim();
        debug_assert_eq!(members.len(), k);
        let mut a = Vec::with_capacity(k * k);
        let mut b = Vec::with_capacity(k);
        for &i in members {
            a.extend_from_slice(&self.hyperplanes[i].coeffs);
            b.push(self.hyperplanes[i].rhs);
        }
        linalg::solve_in_place(&mut a, &mut b, k).then_some(b)
    }

    /// The hyperplanes of a planar arrangement as explicit lines over the
    /// search coordinate.
    pub fn lines(&self) -> Result<Vec<Line2>> {
        if self.dim() != 2 {
            return Err(QregError::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        self.hyperplanes
            .iter()
            .map(|h| {
                let c2 = h.coeffs[1];
                if c2.abs() <= SINGULAR_EPS * h.max_abs_coeff() || c2 == 0.0 {
                    Err(QregError::Degenerate("vertical line in planar arrangement".into()))
                } else {
                    Ok(Line2 {
                        offset: h.rhs / c2,
                        rate: h.coeffs[0] / c2,
                    })
                }
            })
            .collect()
    }

    /// The hyperplanes of a 1-dimensional arrangement as search-coordinate
    /// values. Rows with a vanishing coefficient are skipped.
    pub fn points(&self) -> Vec<f64> {
        debug_assert_eq!(self.dim(), 1);
        self.hyperplanes
            .iter()
            .filter(|h| h.coeffs[0] != 0.0)
            .map(|h| h.rhs / h.coeffs[0])
            .collect()
    }
}
