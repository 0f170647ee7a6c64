//! Pinball objective, residual partitions and the running aggregates that
//! let neighbouring vertices be scored in O(d).

use crate::dataset::{Dataset, Quantile};
use crate::error::{QregError, Result};

/// Number of incremental updates after which solvers rebuild their
/// aggregates from scratch.
pub const RECOMPUTE_INTERVAL: usize = 4096;

/// Split of the points into `I+` (residual >= 0, zero residuals included)
/// and `I-` (residual < 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualPartition {
    in_plus: Vec<bool>,
    zero_count: usize,
}

impl ResidualPartition {
    pub fn from_membership(in_plus: Vec<bool>) -> Self {
        ResidualPartition {
            in_plus,
            zero_count: 0,
        }
    }

    /// Partition induced by `beta`, with residuals within the dataset's zero
    /// tolerance counted as zero.
    pub fn of(ds: &Dataset, beta: &[f64]) -> Self {
        let tol = ds.zero_tolerance();
        let mut zero_count = 0;
        let in_plus = (0..ds.n())
            .map(|i| {
                let r = ds.residual(i, beta);
                if r.abs() <= tol {
                    zero_count += 1;
                }
                r >= -tol
            })
            .collect();
        ResidualPartition { in_plus, zero_count }
    }

    /// Partition by the exact sign of each residual, with no tolerance.
    pub fn by_sign(ds: &Dataset, beta: &[f64]) -> Self {
        let in_plus = (0..ds.n()).map(|i| ds.residual(i, beta) >= 0.0).collect();
        ResidualPartition::from_membership(in_plus)
    }

    pub fn len(&self) -> usize {
        self.in_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_plus.is_empty()
    }

    #[inline]
    pub fn is_plus(&self, i: usize) -> bool {
        self.in_plus[i]
    }

    pub fn plus_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_plus[i]).collect()
    }

    pub fn minus_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.in_plus[i]).collect()
    }

    /// Residuals that were within tolerance of zero when the partition was
    /// computed; all of them sit in `I+`.
    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    pub fn complement(&self) -> Self {
        ResidualPartition {
            in_plus: self.in_plus.iter().map(|p| !p).collect(),
            zero_count: 0,
        }
    }

    fn check(&self, mv: Move) -> Result<()> {
        let need = |i: usize, plus: bool| -> Result<()> {
            if i >= self.len() {
                return Err(QregError::InvalidArgument(format!("point {i} out of range")));
            }
            if self.in_plus[i] != plus {
                return Err(QregError::WrongSide {
                    index: i,
                    expected: if plus { "I+" } else { "I-" },
                });
            }
            Ok(())
        };
        match mv {
            Move::Leave(t) => need(t, true),
            Move::Enter(t) => need(t, false),
            Move::Swap(s, t) => need(s, true).and(need(t, false)),
        }
    }

    fn apply(&mut self, mv: Move) {
        match mv {
            Move::Leave(t) => self.in_plus[t] = false,
            Move::Enter(t) => self.in_plus[t] = true,
            Move::Swap(s, t) => {
                self.in_plus[s] = false;
                self.in_plus[t] = true;
            }
        }
    }
}

/// A change of one or two points' residual side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// `t` moves from `I+` to `I-`.
    Leave(usize),
    /// `t` moves from `I-` to `I+`.
    Enter(usize),
    /// `s` leaves `I+` while `t` enters it.
    Swap(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateState {
    pub sum_y_plus: f64,
    pub sum_x_plus: Vec<f64>,
    pub count_plus: usize,
    pub sum_y_minus: f64,
    pub sum_x_minus: Vec<f64>,
    pub count_minus: usize,
}

impl AggregateState {
    fn empty(d: usize) -> Self {
        AggregateState {
            sum_y_plus: 0.0,
            sum_x_plus: vec![0.0; d],
            count_plus: 0,
            sum_y_minus: 0.0,
            sum_x_minus: vec![0.0; d],
            count_minus: 0,
        }
    }

    /// Applies `mv` without checking which side its points are on.
    #[inline]
    pub fn apply_unchecked(&mut self, mv: Move, ds: &Dataset) {
        match mv {
            Move::Leave(t) => {
                self.shift(ds, t, -1.0);
                self.count_plus -= 1;
                self.count_minus += 1;
            }
            Move::Enter(t) => {
                self.shift(ds, t, 1.0);
                self.count_plus += 1;
                self.count_minus -= 1;
            }
            Move::Swap(s, t) => {
                let (xs, xt) = (ds.row(s), ds.row(t));
                let dy = ds.y(t) - ds.y(s);
                self.sum_y_plus += dy;
                self.sum_y_minus -= dy;
                for m in 0..xs.len() {
                    let dx = xt[m] - xs[m];
                    self.sum_x_plus[m] += dx;
                    self.sum_x_minus[m] -= dx;
                }
            }
        }
    }

    /// Moves point `i`'s contribution towards `I+` (`sign = 1`) or `I-`.
    #[inline]
    fn shift(&mut self, ds: &Dataset, i: usize, sign: f64) {
        let y = sign * ds.y(i);
        self.sum_y_plus += y;
        self.sum_y_minus -= y;
        for (m, x) in ds.row(i).iter().enumerate() {
            self.sum_x_plus[m] += sign * x;
            self.sum_x_minus[m] -= sign * x;
        }
    }

    /// Largest absolute difference between corresponding fields; counts
    /// that differ make the distance infinite.
    pub fn distance(&self, other: &AggregateState) -> f64 {
        if self.count_plus != other.count_plus || self.count_minus != other.count_minus {
            return f64::INFINITY;
        }
        let xs = self
            .sum_x_plus
            .iter()
            .zip(&other.sum_x_plus)
            .chain(self.sum_x_minus.iter().zip(&other.sum_x_minus))
            .map(|(a, b)| (a - b).abs());
        xs.fold(
            (self.sum_y_plus - other.sum_y_plus)
                .abs()
                .max((self.sum_y_minus - other.sum_y_minus).abs()),
            f64::max,
        )
    }
}

/// Pinball loss of `beta` and the partition it induces. O(n d).
pub fn compute_score(ds: &Dataset, tau: Quantile, beta: &[f64]) -> (f64, ResidualPartition) {
    let part = ResidualPartition::of(ds, beta);
    (objective(ds, tau, beta), part)
}

/// Pinball loss of `beta` without building the partition.
pub fn objective(ds: &Dataset, tau: Quantile, beta: &[f64]) -> f64 {
    let t = tau.value();
    (0..ds.n())
        .map(|i| pinball(t, ds.residual(i, beta)))
        .sum()
}

#[inline]
pub(crate) fn pinball(tau: f64, r: f64) -> f64 {
    if r >= 0.0 {
        tau * r
    } else {
        (tau - 1.0) * r
    }
}

/// The loss evaluated from side sums alone. Valid when `agg` was built for
/// the partition `beta` induces.
pub fn score_from_aggregates(agg: &AggregateState, tau: Quantile, beta: &[f64]) -> f64 {
    let t = tau.value();
    let dot = |s: &[f64]| s.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>();
    let plus = agg.sum_y_plus - dot(&agg.sum_x_plus);
    let minus = dot(&agg.sum_x_minus) - agg.sum_y_minus;
    t * plus + (1.0 - t) * minus
}

pub fn aggregates_from_partition(ds: &Dataset, part: &ResidualPartition) -> AggregateState {
    let mut agg = AggregateState::empty(ds.d());
    for i in 0..ds.n() {
        let (sy, sx, count) = if part.is_plus(i) {
            (&mut agg.sum_y_plus, &mut agg.sum_x_plus, &mut agg.count_plus)
        } else {
            (&mut agg.sum_y_minus, &mut agg.sum_x_minus, &mut agg.count_minus)
        };
        *sy += ds.y(i);
        for (s, x) in sx.iter_mut().zip(ds.row(i)) {
            *s += x;
        }
        *count += 1;
    }
    agg
}

/// Applies `mv` to both the aggregates and the partition after checking its
/// precondition.
pub fn update_neighbor(
    agg: &mut AggregateState,
    part: &mut ResidualPartition,
    mv: Move,
    ds: &Dataset,
) -> Result<()> {
    part.check(mv)?;
    agg.apply_unchecked(mv, ds);
    part.apply(mv);
    Ok(())
}

/// Aggregates paired with their partition, rebuilt from scratch every
/// [`RECOMPUTE_INTERVAL`] updates.
#[derive(Debug, Clone)]
pub struct TrackedAggregates {
    agg: AggregateState,
    part: ResidualPartition,
    since_refresh: usize,
}

impl TrackedAggregates {
    pub fn new(ds: &Dataset, part: ResidualPartition) -> Self {
        TrackedAggregates {
            agg: aggregates_from_partition(ds, &part),
            part,
            since_refresh: 0,
        }
    }

    pub fn aggregates(&self) -> &AggregateState {
        &self.agg
    }

    pub fn partition(&self) -> &ResidualPartition {
        &self.part
    }

    pub fn apply(&mut self, mv: Move, ds: &Dataset) -> Result<()> {
        update_neighbor(&mut self.agg, &mut self.part, mv, ds)?;
        self.since_refresh += 1;
        if self.since_refresh >= RECOMPUTE_INTERVAL {
            self.agg = aggregates_from_partition(ds, &self.part);
            self.since_refresh = 0;
        }
        Ok(())
    }

    pub fn score(&self, tau: Quantile, beta: &[f64]) -> f64 {
        score_from_aggregates(&self.agg, tau, beta)
    }
}

/// Margin by which a candidate must beat `value` to count as an improvement.
pub(crate) fn improvement_margin(ds: &Dataset, value: f64) -> f64 {
    1e-12 * value.abs().max(ds.response_scale())
}

/// Counts of positive, negative and zero residuals under `beta`.
pub fn residual_sign_counts(ds: &Dataset, beta: &[f64]) -> (usize, usize, usize) {
    let tol = ds.zero_tolerance();
    let mut counts = (0, 0, 0);
    for i in 0..ds.n() {
        let r = ds.residual(i, beta);
        if r.abs() <= tol {
            counts.2 += 1;
        } else if r > 0.0 {
            counts.0 += 1;
        } else {
            counts.1 += 1;
        }
    }
    counts
}

/// Whether moving the intercept of `beta` in either direction cannot lower
/// the loss: `(1-tau)(N- + N0) >= tau N+` and `tau(N+ + N0) >= (1-tau) N-`.
pub fn intercept_subgradient_holds(ds: &Dataset, tau: Quantile, beta: &[f64]) -> bool {
    let (p, m, z) = residual_sign_counts(ds, beta);
    let t = tau.value();
    let slack = 1e-12 * ds.n() as f64;
    (1.0 - t) * (m + z) as f64 >= t * p as f64 - slack
        && t * (p + z) as f64 >= (1.0 - t) * m as f64 - slack
}
