//! Finite unions of closed intervals on the non-negative half-line.

use crate::Error;
use serde::{Deserialize, Serialize};

/// Ordered, disjoint, closed intervals in `R>=0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Builds a set from arbitrary closed intervals, merging overlaps.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self, Error> {
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::UnboundedIntervals);
            }
            if a < 0.0 || b < a {
                return Err(Error::MalformedIntervals(format!("[{a}, {b}]")));
            }
        }
        intervals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    /// Single interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self, Error> {
        Self::new(vec![(a, b)])
    }

    /// Parses `a:b[,c:d...]`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty());
        }
        let mut intervals = Vec::new();
        for part in text.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::MalformedIntervals(part.to_string()))?;
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::MalformedIntervals(part.to_string()))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::MalformedIntervals(part.to_string()))?;
            intervals.push((a, b));
        }
        Self::new(intervals)
    }

    /// Canonical `a:b,c:d` form; inverse of [`IntervalSet::parse`].
    pub fn to_text(&self) -> String {
        self.intervals
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Largest right endpoint, or 0 for the empty set.
    pub fn sup(&self) -> f64 {
        self.intervals.last().map_or(0.0, |&(_, b)| b)
    }

    /// `sum over [a,b] of (b^4 - a^4)/4`, the `t^3 dt` measure of the set.
    pub fn cubic_measure(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.powi(4) - a.powi(4)) / 4.0)
            .sum()
    }

    /// Blow-up: the closed `eps`-neighborhood intersected with `R>=0`.
    pub fn blow_up(&self, eps: f64) -> Self {
        let widened = self
            .intervals
            .iter()
            .map(|&(a, b)| ((a - eps).max(0.0), b + eps))
            .collect();
        Self::new(widened).expect("widened intervals stay valid")
    }

    /// Blow-down: points at distance `>= eps` from the complement.
    /// Intervals shorter than `2 eps` vanish.
    pub fn blow_down(&self, eps: f64) -> Self {
        let shrunk = self
            .intervals
            .iter()
            .filter_map(|&(a, b)| {
                let (a, b) = (a + eps, b - eps);
                (a <= b).then_some((a, b))
            })
            .collect();
        Self::new(shrunk).expect("shrunk intervals stay valid")
    }

    /// True when every interval of `self` is contained in some interval of `other`.
    pub fn subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals
            .iter()
            .all(|&(a, b)| other.intervals.iter().any(|&(c, d)| c <= a && b <= d))
    }
}
