use super::inversions::inversion_counts;
use super::SearchInterval;
use crate::geometry::{crossing, Line2};

/// Top-to-bottom line orders just inside both ends of a search interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOrders {
    pub start_order: Vec<usize>,
    pub end_order: Vec<usize>,
    /// Inverted pairs each line takes part in, by line id.
    pub per_line_inversions: Vec<u64>,
    pub total: u64,
}

impl BoundaryOrders {
    /// Lines whose order relative to `i` differs between the two ends, i.e.
    /// that cross `i` inside the interval.
    pub fn partners(&self, i: usize) -> Vec<usize> {
        let n = self.start_order.len();
        let mut ps = vec![0; n];
        let mut pe = vec![0; n];
        for p in 0..n {
            ps[self.start_order[p]] = p;
            pe[self.end_order[p]] = p;
        }
        (0..n)
            .filter(|&j| j != i && (ps[i] < ps[j]) != (pe[i] < pe[j]))
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Side {
    /// Order just right of the boundary; crossings on it are behind us.
    After,
    /// Order just left of the boundary; crossings on it are still ahead.
    Before,
}

/// Orders the lines just inside `r` at both ends and counts inversions.
///
/// Infinite ends sort by rate. Finite ends sort by value at the boundary and
/// then settle near-ties combinatorially, treating crossings within a small
/// tolerance of the boundary as lying on it, so they fall outside the open
/// interval.
pub fn boundary_orders(lines: &[Line2], r: SearchInterval) -> BoundaryOrders {
    let start_order = order_at(lines, r.lo, Side::After);
    let end_order = order_at(lines, r.hi, Side::Before);
    let (total, per_line_inversions) =
        inversion_counts(&start_order, &end_order).expect("both orders permute the same lines");
    BoundaryOrders {
        start_order,
        end_order,
        per_line_inversions,
        total,
    }
}

fn order_at(lines: &[Line2], t: f64, side: Side) -> Vec<usize> {
    let mut order: Vec<usize> = (0..lines.len()).collect();
    if t == f64::NEG_INFINITY {
        order.sort_by(|&i, &j| {
            lines[j].rate.total_cmp(&lines[i].rate)
                .then(lines[j].offset.total_cmp(&lines[i].offset))
                .then(i.cmp(&j))
        });
        return order;
    }
    if t == f64::INFINITY {
        order.sort_by(|&i, &j| {
            lines[i].rate.total_cmp(&lines[j].rate)
                .then(lines[j].offset.total_cmp(&lines[i].offset))
                .then(i.cmp(&j))
        });
        return order;
    }

    let values: Vec<f64> = lines.iter().map(|l| l.value(t)).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let scale = t.abs().max(1.0);
    let delta = 1e-11 * scale;
    let near = |i: usize, j: usize| {
        let (a, b) = (&lines[i], &lines[j]);
        let tol = 1e-10 * (1.0 + a.offset.abs() + b.offset.abs() + (a.rate.abs() + b.rate.abs()) * scale);
        (values[i] - values[j]).abs() <= tol
    };
    let above = |i: usize, j: usize| -> bool {
        let (a, b) = (&lines[i], &lines[j]);
        match crossing(a, b) {
            None => a.offset > b.offset || (a.offset == b.offset && i < j),
            Some(c) => {
                let passed = match side {
                    Side::After => c <= t + delta,
                    Side::Before => c < t - delta,
                };
                if passed {
                    a.rate < b.rate
                } else {
                    a.rate > b.rate
                }
            }
        }
    };
    for p in 1..order.len() {
        let mut q = p;
        while q > 0 && near(order[q - 1], order[q]) && above(order[q], order[q - 1]) {
            order.swap(q - 1, q);
            q -= 1;
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_lines() -> Vec<Line2> {
        vec![Line2::of_point(1.0, 0.0), Line2::of_point(-1.0, 0.0)]
    }

    #[test]
    fn crossing_pair_inverts_once() {
        let o = boundary_orders(&x_lines(), SearchInterval::full());
        assert_eq!(o.start_order, vec![0, 1]);
        assert_eq!(o.end_order, vec![1, 0]);
        assert_eq!(o.total, 1);
        assert_eq!(o.partners(0), vec![1]);
    }

    #[test]
    fn interval_without_crossing() {
        let o = boundary_orders(&x_lines(), SearchInterval::new(1.0, 2.0).unwrap());
        assert_eq!(o.start_order, o.end_order);
        assert_eq!(o.total, 0);
    }

    #[test]
    fn crossing_on_boundary_is_excluded() {
        for r in [SearchInterval::new(0.0, 1.0).unwrap(), SearchInterval::new(-1.0, 0.0).unwrap()] {
            let o = boundary_orders(&x_lines(), r);
            assert_eq!(o.total, 0, "{r:?}");
        }
        let o = boundary_orders(&x_lines(), SearchInterval::new(-1e-3, 1e-3).unwrap());
        assert_eq!(o.total, 1);
    }

    #[test]
    fn parallel_lines_never_invert() {
        let lines = vec![Line2::of_point(2.0, 1.0), Line2::of_point(2.0, 3.0), Line2::of_point(-1.0, 0.0)];
        let o = boundary_orders(&lines, SearchInterval::full());
        assert_eq!(o.total, 2);
        assert_eq!(o.per_line_inversions, vec![1, 1, 2]);
    }

    #[test]
    fn running_example_full_interval() {
        let ds = crate::dataset::Dataset::running_example();
        let lines = crate::oracle::dual_lines(&ds).unwrap();
        let o = boundary_orders(&lines, SearchInterval::full());
        assert_eq!(o.total, 21);
        assert_eq!(o.per_line_inversions, vec![6; 7]);
        assert_eq!(o.per_line_inversions.iter().sum::<u64>(), 2 * o.total);
    }
}
