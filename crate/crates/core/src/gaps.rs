//! Root-gap observables: scaled pairwise gaps, the annulus counter, the
//! minimal gap and the in-disk separation probe.

use crate::intervals::IntervalSet;
use crate::rootfinder::RootSet;
use crate::{gap_scale, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Pair distances below this are treated as exact double roots; well below
/// the solver's 1e-8 accuracy so genuine near pairs never collapse.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

/// All-pairs scanning is quadratic; above this degree only pairs closer
/// than 1/n are enumerated through a spatial grid, since every gap of
/// interest is far below 1/n.
const ALL_PAIRS_LIMIT: usize = 4096;

/// One trial's gap observables, serialized as a JSONL record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: u32,
    pub law: String,
    /// `n^{5/4}` times the minimal distance over all distinct root pairs
    /// (whole plane); 0 when a numerical double root exists.
    pub m_n_scaled: f64,
    /// Sorted scaled gaps for pairs with both roots in `Omega_K`, up to the
    /// retention cutoff.
    pub gaps: Vec<f64>,
    /// Per interval-set id: roots of `Omega_K` with a companion at scaled
    /// distance inside the set.
    pub x_counts: BTreeMap<String, i64>,
    /// Min pairwise distance among roots with `|z| <= r0`; None when fewer
    /// than two such roots exist (serialized as null).
    pub disk_min_gap: Option<f64>,
    pub max_residual: f64,
}

/// Membership in `Omega_K`: the upper-half-plane part of the annulus
/// `1 - K/n <= |z| <= 1 + K/n`, boundary inclusive.
pub fn in_annulus(z: C64, k: f64, n: u32) -> bool {
    let band = k / n as f64;
    let r = z.norm();
    z.im > 0.0 && r >= 1.0 - band && r <= 1.0 + band
}

/// Roots of `rs` lying in `Omega_K`.
pub fn roots_in_annulus(rs: &RootSet, k: f64, n: u32) -> Vec<C64> {
    rs.roots
        .iter()
        .copied()
        .filter(|&z| in_annulus(z, k, n))
        .collect()
}

/// Sorted scaled gaps `n^{5/4} |a - b|` over pairs with both roots in
/// `Omega_K`, retaining only gaps at or below `cutoff`.
pub fn pair_gaps(rs: &RootSet, n: u32, k: f64, cutoff: f64) -> Vec<f64> {
    let annulus = roots_in_annulus(rs, k, n);
    let scale = gap_scale(n);
    let mut gaps = Vec::new();
    for i in 0..annulus.len() {
        for j in (i + 1)..annulus.len() {
            let g = scale * (annulus[i] - annulus[j]).norm();
            if g <= cutoff {
                gaps.push(g);
            }
        }
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    gaps
}

/// The annulus counter: roots in `Omega_K` having another root (anywhere)
/// at scaled distance inside `U`. Counts roots, not pairs: an isolated
/// close pair inside `Omega_K` contributes 2.
pub fn count_x_n(rs: &RootSet, k: f64, u: &IntervalSet, n: u32) -> i64 {
    if u.is_empty() {
        return 0;
    }
    let scale = gap_scale(n);
    let mut count = 0;
    for (i, &alpha) in rs.roots.iter().enumerate() {
        if !in_annulus(alpha, k, n) {
            continue;
        }
        let has_companion = rs
            .roots
            .iter()
            .enumerate()
            .any(|(j, &other)| j != i && u.contains(scale * (alpha - other).norm()));
        if has_companion {
            count += 1;
        }
    }
    count
}

/// Pair form of the annulus counter: unordered pairs with both roots in
/// `Omega_K` and scaled gap in `U`. This is the quantity the two-sided net
/// sandwich compares against; the root-count form above double-counts each
/// isolated pair.
pub fn count_pairs_in_u(rs: &RootSet, k: f64, u: &IntervalSet, n: u32) -> i64 {
    let annulus = roots_in_annulus(rs, k, n);
    let scale = gap_scale(n);
    let mut count = 0;
    for i in 0..annulus.len() {
        for j in (i + 1)..annulus.len() {
            if u.contains(scale * (annulus[i] - annulus[j]).norm()) {
                count += 1;
            }
        }
    }
    count
}

fn min_pair_distance_bucketed(roots: &[C64], radius: f64) -> f64 {
    // Grid buckets of side `radius`; only neighboring buckets can hold a
    // pair closer than `radius`.
    let mut buckets: BTreeMap<(i64, i64), Vec<C64>> = BTreeMap::new();
    for &z in roots {
        let key = (
            (z.re / radius).floor() as i64,
            (z.im / radius).floor() as i64,
        );
        buckets.entry(key).or_default().push(z);
    }
    let mut min = f64::INFINITY;
    for (&(bx, by), cell) in &buckets {
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(other) = buckets.get(&(bx + dx, by + dy)) else {
                    continue;
                };
                for (i, &a) in cell.iter().enumerate() {
                    let start = if dx == 0 && dy == 0 { i + 1 } else { 0 };
                    for &b in &other[start..] {
                        if (dx, dy) != (0, 0) || !std::ptr::eq(cell, other) || a != b {
                            min = min.min((a - b).norm());
                        }
                    }
                }
            }
        }
    }
    min
}

/// Minimal distance over all distinct root pairs in the whole plane.
pub fn min_pair_distance(roots: &[C64]) -> f64 {
    if roots.len() < 2 {
        return f64::INFINITY;
    }
    if roots.len() <= ALL_PAIRS_LIMIT {
        let mut min = f64::INFINITY;
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                min = min.min((roots[i] - roots[j]).norm());
            }
        }
        min
    } else {
        let n = roots.len() as f64;
        let mut radius = 1.0 / n;
        loop {
            let min = min_pair_distance_bucketed(roots, radius);
            if min.is_finite() {
                return min;
            }
            radius *= 4.0;
        }
    }
}

/// `n^{5/4} m_n`: the scaled minimal gap over all distinct pairs, zero
/// when a numerical double root (closer than 1e-12) exists.
pub fn min_gap(rs: &RootSet, n: u32) -> f64 {
    let min = min_pair_distance(&rs.roots);
    if min < DOUBLE_ROOT_TOL {
        0.0
    } else {
        gap_scale(n) * min
    }
}

/// Minimal pairwise distance among roots with `|z| <= r0`, or None with
/// fewer than two such roots.
pub fn disk_min_gap(rs: &RootSet, r0: f64) -> Option<f64> {
    let inside: Vec<C64> = rs
        .roots
        .iter()
        .copied()
        .filter(|z| z.norm() <= r0)
        .collect();
    if inside.len() < 2 {
        return None;
    }
    Some(min_pair_distance(&inside))
}

/// Count of root pairs that coincide at the origin (both within 1e-9 of 0
/// and closer than the double-root tolerance); used by the atom-at-zero
/// demonstrations.
pub fn origin_double_root(rs: &RootSet) -> bool {
    let at_origin = rs.roots.iter().filter(|z| z.norm() < 1e-9).count();
    at_origin >= 2
}
