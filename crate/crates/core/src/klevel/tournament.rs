use crate::geometry::{crossing, Line2};

const NONE: u32 = u32::MAX;

/// Kinetic tournament over a subset of lines, tracking the lowest (or
/// highest) member as `z1` sweeps to the right.
///
/// Every internal node keeps the winner of its two children together with
/// the time at which their order flips. Leaves are fixed slots, one per
/// line, switched on and off as lines join or leave the set.
pub(super) struct Tournament {
    size: usize,
    lowest: bool,
    winner: Vec<u32>,
    fail: Vec<f64>,
    min_fail: Vec<f64>,
}

impl Tournament {
    pub(super) fn new(n: usize, lowest: bool) -> Self {
        let size = n.next_power_of_two().max(1);
        Tournament {
            size,
            lowest,
            winner: vec![NONE; 2 * size],
            fail: vec![f64::INFINITY; 2 * size],
            min_fail: vec![f64::INFINITY; 2 * size],
        }
    }

    /// Fills the tournament with `members` at time `t` in O(n).
    pub(super) fn build(&mut self, lines: &[Line2], members: &[usize], t: f64) {
        for &i in members {
            self.winner[self.size + i] = i as u32;
        }
        for node in (1..self.size).rev() {
            self.pull(lines, node, t);
        }
    }

    pub(super) fn winner(&self) -> Option<usize> {
        let w = self.winner[1];
        (w != NONE).then_some(w as usize)
    }

    pub(super) fn contains(&self, i: usize) -> bool {
        self.winner[self.size + i] != NONE
    }

    /// Earliest time at which some internal comparison flips.
    pub(super) fn next_change(&self) -> f64 {
        self.min_fail[1]
    }

    pub(super) fn insert(&mut self, lines: &[Line2], i: usize, t: f64) {
        self.winner[self.size + i] = i as u32;
        self.update_from(lines, self.size + i, t);
    }

    pub(super) fn remove(&mut self, lines: &[Line2], i: usize, t: f64) {
        self.winner[self.size + i] = NONE;
        self.update_from(lines, self.size + i, t);
    }

    /// Resolves the earliest pending flip; the caller sets `t` to
    /// [`next_change`](Self::next_change).
    pub(super) fn advance(&mut self, lines: &[Line2], t: f64) {
        let target = self.min_fail[1];
        let mut node = 1;
        while self.fail[node] != target {
            node = if self.min_fail[2 * node] == target {
                2 * node
            } else {
                2 * node + 1
            };
        }
        self.pull(lines, node, t);
        self.update_from(lines, node, t);
    }

    fn update_from(&mut self, lines: &[Line2], mut node: usize, t: f64) {
        while node > 1 {
            node /= 2;
            self.pull(lines, node, t);
        }
    }

    fn pull(&mut self, lines: &[Line2], node: usize, t: f64) {
        let (l, r) = (self.winner[2 * node], self.winner[2 * node + 1]);
        let (w, f) = if l == NONE {
            (r, f64::INFINITY)
        } else if r == NONE {
            (l, f64::INFINITY)
        } else {
            let (a, b) = (l as usize, r as usize);
            let a_above = lines[a].above_after(a, &lines[b], b, t);
            let w = if a_above != self.lowest { l } else { r };
            let f = match crossing(&lines[a], &lines[b]) {
                Some(c) if c > t => c,
                _ => f64::INFINITY,
            };
            (w, f)
        };
        self.winner[node] = w;
        self.fail[node] = f;
        let below = if 2 * node < self.size {
            self.min_fail[2 * node].min(self.min_fail[2 * node + 1])
        } else {
            f64::INFINITY
        };
        self.min_fail[node] = f.min(below);
    }
}
