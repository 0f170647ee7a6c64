use crate::error::{QregError, Result};

/// Open range `(lo, hi)` of the search coordinate `z_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SearchInterval {
    pub fn full() -> Self {
        SearchInterval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(QregError::InvalidArgument(format!(
                "search interval needs lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(SearchInterval { lo, hi })
    }

    /// Dual coordinate the interval constrains; always `z_1`.
    pub fn coord(&self) -> usize {
        0
    }

    #[inline]
    pub fn contains(&self, z1: f64) -> bool {
        self.lo < z1 && z1 < self.hi
    }

    /// `(lo, v)`.
    pub fn left_of(&self, v: f64) -> Self {
        SearchInterval { lo: self.lo, hi: v }
    }

    /// `(v, hi)`.
    pub fn right_of(&self, v: f64) -> Self {
        SearchInterval { lo: v, hi: self.hi }
    }
}

impl Default for SearchInterval {
    fn default() -> Self {
        Self::full()
    }
}
