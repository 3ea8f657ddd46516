//! Compact intervals and K-cells.
//!
//! The domain K of every function here is a compact interval `[a, b]`
//! (possibly degenerate). A [`Cell`] is an interval with individually
//! open or closed ends; partitions and step functions are built from
//! pairwise-disjoint cells whose union is exactly K.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed interval `[a, b]`, `a <= b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<F> {
    pub a: F,
    pub b: F,
}

impl<F: Real> Interval<F> {
    pub fn new(a: F, b: F) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::Argument(format!(
                "invalid interval [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn contains(&self, x: F) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn width(&self) -> F {
        self.b - self.a
    }

    pub fn midpoint(&self) -> F {
        (self.a + self.b) / F::of(2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Error unless `x` lies in the interval.
    pub fn check(&self, x: F) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: x.as_f64(),
                lo: self.a.as_f64(),
                hi: self.b.as_f64(),
            })
        }
    }
}

impl<F: Real> fmt::Display for Interval<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Interval with individually open/closed endpoints; may be a singleton
/// (`lo == hi`, both ends closed).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell<F> {
    pub lo: F,
    pub hi: F,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<F: Real> Cell<F> {
    pub fn new(lo: F, hi: F, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::Argument(format!("invalid cell bounds {lo}, {hi}")));
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(Error::Argument(format!(
                "degenerate cell at {lo} must be closed on both ends"
            )));
        }
        Ok(Self { lo, hi, lo_closed, hi_closed })
    }

    pub fn singleton(p: F) -> Self {
        Self { lo: p, hi: p, lo_closed: true, hi_closed: true }
    }

    /// `[lo, hi)`.
    pub fn half_open(lo: F, hi: F) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    /// `[lo, hi]`.
    pub fn closed(lo: F, hi: F) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// `(lo, hi)`.
    pub fn open(lo: F, hi: F) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> F {
        self.hi - self.lo
    }

    pub fn contains(&self, x: F) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// A point guaranteed to lie inside the cell (used for constant-value
    /// sampling on overlays).
    pub fn representative(&self) -> F {
        if self.is_singleton() {
            self.lo
        } else {
            (self.lo + self.hi) / F::of(2.0)
        }
    }

    /// Whether `other` starts exactly where `self` ends, with the shared
    /// boundary point belonging to exactly one of the two.
    pub fn abuts(&self, other: &Cell<F>) -> bool {
        self.hi == other.lo && (self.hi_closed ^ other.lo_closed)
    }
}

impl<F: Real> fmt::Display for Cell<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// Validates that `cells` are ordered, pairwise disjoint, mutually
/// adjacent and cover `[k.a, k.b]` exactly.
pub fn check_cover<F: Real>(k: &Interval<F>, cells: &[Cell<F>]) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::Argument("empty cell list".into()));
    }
    let first = &cells[0];
    if first.lo != k.a || !first.lo_closed {
        return Err(Error::Argument(format!(
            "cells must start closed at {} (got {first})",
            k.a
        )));
    }
    let last = cells.last().unwrap();
    if last.hi != k.b || !last.hi_closed {
        return Err(Error::Argument(format!(
            "cells must end closed at {} (got {last})",
            k.b
        )));
    }
    for pair in cells.windows(2) {
        if !pair[0].abuts(&pair[1]) {
            return Err(Error::Argument(format!(
                "cells {} and {} do not abut",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_respects_open_ends() {
        let c = Cell::half_open(0.0, 1.0).unwrap();
        assert!(c.contains(0.0));
        assert!(c.contains(0.5));
        assert!(!c.contains(1.0));
        let s = Cell::<f64>::singleton(0.5);
        assert!(s.contains(0.5));
        assert!(!s.contains(0.5 + 1e-12));
    }

    #[test]
    fn degenerate_cells_must_be_closed() {
        assert!(Cell::new(1.0, 1.0, true, false).is_err());
        assert!(Cell::new(1.0, 0.0, true, true).is_err());
    }

    #[test]
    fn cover_checks_adjacency() {
        let k = Interval::new(0.0, 1.0).unwrap();
        let good = vec![
            Cell::half_open(0.0, 0.5).unwrap(),
            Cell::singleton(0.5),
            Cell::new(0.5, 1.0, false, true).unwrap(),
        ];
        check_cover(&k, &good).unwrap();

        let overlapping = vec![
            Cell::closed(0.0, 0.5).unwrap(),
            Cell::closed(0.5, 1.0).unwrap(),
        ];
        assert!(check_cover(&k, &overlapping).is_err());

        let gap = vec![
            Cell::half_open(0.0, 0.4).unwrap(),
            Cell::new(0.5, 1.0, true, true).unwrap(),
        ];
        assert!(check_cover(&k, &gap).is_err());
    }
}
