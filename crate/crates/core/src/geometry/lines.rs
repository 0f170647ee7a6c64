/// A non-vertical line of a planar dual arrangement, `z2 = offset - rate * z1`.
///
/// The dual of a point `(x, y)` has `offset = y` and `rate = x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line2 {
    pub offset: f64,
    pub rate: f64,
}

impl Line2 {
    pub fn of_point(x: f64, y: f64) -> Self {
        Line2 { offset: y, rate: x }
    }

    #[inline]
    pub fn value(&self, z1: f64) -> f64 {
        self.offset - self.rate * z1
    }

    /// True when `self` (id `i`) lies above `other` (id `j`) on the open
    /// stretch immediately to the right of `t`. `t` may be `-inf`.
    /// Parallel lines are ordered by offset, then by id.
    #[inline]
    pub fn above_after(&self, i: usize, other: &Line2, j: usize, t: f64) -> bool {
        match crossing(self, other) {
            None => {
                self.offset > other.offset || (self.offset == other.offset && i < j)
            }
            Some(c) if t >= c => self.rate < other.rate,
            Some(_) => self.rate > other.rate,
        }
    }
}

/// `z1` where the two lines meet, or `None` for parallel lines.
#[inline]
pub fn crossing(a: &Line2, b: &Line2) -> Option<f64> {
    let dr = a.rate - b.rate;
    if dr == 0.0 {
        None
    } else {
        Some((a.offset - b.offset) / dr)
    }
}
