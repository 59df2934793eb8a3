//! Estimators tying Monte Carlo output to the limit law: KS distances,
//! factorial moments, intensity histograms, scaling-exponent regressions
//! and the anti-concentration check.

use crate::gaps::GapRecord;
use crate::intensity::c_star_k;
use crate::rootfinder::{find_roots, SolverOptions};
use crate::sampling::{sample_polynomial, trial_seed, CoefficientLaw};
use crate::{Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Sorted sample values.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Sup over sample points of |empirical CDF - (1 - survival)|.
pub fn ks_distance<F: Fn(f64) -> f64>(ecdf: &EmpiricalCdf, survival: F) -> f64 {
    let n = ecdf.values.len() as f64;
    ecdf.values
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - (1.0 - survival(x))).abs())
        .fold(0.0, f64::max)
}

/// Two-sample KS distance. Ties advance both sides before the gap is
/// measured, so identical samples give exactly zero.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (xs, ys) = (&a.values, &b.values);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        let fa = i as f64 / xs.len() as f64;
        let fb = j as f64 / ys.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentEntry {
    pub order: u32,
    /// Mean of the falling factorial `(x)_m` over the counts.
    pub empirical: f64,
    pub std_error: f64,
    /// `lambda^m` when an intensity was supplied.
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub entries: Vec<MomentEntry>,
    pub samples: usize,
}

fn falling_factorial(x: f64, m: u32) -> f64 {
    (0..m).map(|i| x - i as f64).product()
}

/// Empirical factorial moments `E[(X)_m]` for `m = 1..=max_m`, with
/// jackknife standard errors (which coincide with the plain standard error
/// of the mean), optionally paired with Poisson theory `lambda^m`.
pub fn factorial_moments(
    counts: &[i64],
    max_m: u32,
    lambda: Option<f64>,
) -> Result<MomentReport, Error> {
    if max_m > 4 {
        return Err(Error::InvalidArgument(format!("max_m = {max_m} > 4")));
    }
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = counts.len() as f64;
    let entries = (1..=max_m)
        .map(|m| {
            let transformed: Vec<f64> = counts
                .iter()
                .map(|&c| falling_factorial(c as f64, m))
                .collect();
            let mean = transformed.iter().sum::<f64>() / n;
            let var = transformed
                .iter()
                .map(|t| (t - mean) * (t - mean))
                .sum::<f64>()
                / (n - 1.0).max(1.0);
            MomentEntry {
                order: m,
                empirical: mean,
                std_error: (var / n).sqrt().max(f64::MIN_POSITIVE),
                theory: lambda.map(|l| l.powi(m as i32)),
            }
        })
        .collect();
    Ok(MomentReport {
        entries,
        samples: counts.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    /// Mean count per trial.
    pub rate: f64,
    /// `c*(K) (hi^4 - lo^4) / 4`.
    pub theory: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramReport {
    pub bins: Vec<HistogramBin>,
    pub trials: usize,
    /// `sum (observed - expected)^2 / expected` over bins with expected > 0.
    pub chi_square: f64,
}

/// Bins the pooled scaled pair gaps of `records` (half-open bins `[lo, hi)`)
/// against the limiting per-trial rate `c*(K) t^3 dt`.
pub fn gap_intensity_histogram(
    records: &[GapRecord],
    bins: &[(f64, f64)],
    k: f64,
) -> Result<HistogramReport, Error> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    let n0 = records[0].n;
    if let Some(r) = records.iter().find(|r| r.n != n0) {
        return Err(Error::MixedDegrees(n0, r.n));
    }
    let ck = c_star_k(k)?;
    let trials = records.len();
    let mut chi_square = 0.0;
    let bins = bins
        .iter()
        .map(|&(lo, hi)| {
            let count: u64 = records
                .iter()
                .map(|r| r.gaps.iter().filter(|&&g| g >= lo && g < hi).count() as u64)
                .sum();
            let rate = count as f64 / trials as f64;
            let theory = ck * (hi.powi(4) - lo.powi(4)) / 4.0;
            let expected = theory * trials as f64;
            if expected > 0.0 {
                chi_square += (count as f64 - expected).powi(2) / expected;
            }
            HistogramBin {
                lo,
                hi,
                count,
                rate,
                theory,
                relative_deviation: if theory > 0.0 {
                    (rate - theory) / theory
                } else {
                    0.0
                },
            }
        })
        .collect();
    Ok(HistogramReport {
        bins,
        trials,
        chi_square,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub slope: f64,
    pub radii: Vec<f64>,
    pub hit_fractions: Vec<f64>,
    pub trials: u64,
}

fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn slope_from_hits(radii: &[f64], hits: &[u64], trials: u64) -> Result<SlopeReport, Error> {
    let zero_radii = hits.iter().filter(|&&h| h == 0).count();
    if zero_radii * 2 > radii.len() {
        return Err(Error::TooFewHits {
            hits: radii.len() - zero_radii,
            total: radii.len(),
        });
    }
    let points: Vec<(f64, f64)> = radii
        .iter()
        .zip(hits)
        .filter(|(_, &h)| h > 0)
        .map(|(&r, &h)| (r.ln(), (h as f64 / trials as f64).ln()))
        .collect();
    Ok(SlopeReport {
        slope: regression_slope(&points),
        radii: radii.to_vec(),
        hit_fractions: hits.iter().map(|&h| h as f64 / trials as f64).collect(),
        trials,
    })
}

/// Log-log slope of `P[>= 2 roots of f_n in D(x, r)]` against `r`.
/// The repulsion heuristic predicts slope 6.
///
/// The per-disk probability at these radii is of order 1e-4, so a single
/// fixed center would need millions of trials; the local pair statistics
/// are stationary in the angle away from the real axis, so the estimate
/// pools `centers` rotated copies of `center` across the upper arc
/// (disjoint disks, one root set each trial). `centers = 1` reduces to
/// the plain fixed-center Monte Carlo.
pub fn scaling_regression_roots(
    law: CoefficientLaw,
    n: u32,
    center: C64,
    radii: &[f64],
    trials: u64,
    seed: u64,
    centers: u32,
) -> Result<SlopeReport, Error> {
    let nf = n as f64;
    for &r in radii {
        if r < nf.powf(-1.5) || r > nf.powf(-1.0) {
            return Err(Error::InvalidArgument(format!(
                "radius {r} outside [n^-3/2, n^-1]"
            )));
        }
    }
    let opts = SolverOptions::default();
    let radius_max = radii.iter().cloned().fold(0.0, f64::max);
    // Rotated centers across arg in [0.4, pi - 0.4], same modulus.
    let modulus = center.norm();
    let points: Vec<C64> = (0..centers)
        .map(|m| {
            let theta = if centers == 1 {
                center.arg()
            } else {
                0.4 + (std::f64::consts::PI - 0.8) * (m as f64 + 0.5) / centers as f64
            };
            C64::from_polar(modulus, theta)
        })
        .collect();
    let mut hits = vec![0u64; radii.len()];
    for t in 0..trials {
        let poly = sample_polynomial(law, n, trial_seed(seed, t))?;
        let rs = find_roots(&poly, opts)?;
        for &x in &points {
            let mut best = f64::INFINITY;
            let mut second = f64::INFINITY;
            for &root in &rs.roots {
                let d = (root - x).norm();
                if d < best {
                    second = best;
                    best = d;
                } else if d < second {
                    second = d;
                }
            }
            if second <= radius_max {
                for (h, &r) in hits.iter_mut().zip(radii) {
                    if second <= r {
                        *h += 1;
                    }
                }
            }
        }
    }
    slope_from_hits(radii, &hits, trials * centers as u64)
}

/// The same regression for the interaction-free toy model: n i.i.d. points
/// uniform in the annulus `1 +- K/n`. Predicted slope 4.
pub fn scaling_regression_toy(
    n: u32,
    k: f64,
    center: C64,
    radii: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SlopeReport, Error> {
    let band = k / n as f64;
    let (r_in, r_out) = (1.0 - band, 1.0 + band);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; radii.len()];
    let max_radius = radii.iter().cloned().fold(0.0, f64::max);
    for _ in 0..trials {
        let mut best = f64::INFINITY;
        let mut second = f64::INFINITY;
        for _ in 0..n {
            let r = (r_in * r_in + (r_out * r_out - r_in * r_in) * rng.random::<f64>()).sqrt();
            let theta = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            let d = (C64::from_polar(r, theta) - center).norm();
            if d < best {
                second = best;
                best = d;
            } else if d < second {
                second = d;
            }
        }
        if second <= max_radius {
            for (h, &rad) in hits.iter_mut().zip(radii) {
                if second <= rad {
                    *h += 1;
                }
            }
        }
    }
    slope_from_hits(radii, &hits, trials)
}

#[derive(Debug, Clone, Serialize)]
pub struct LkrReport {
    /// Monte Carlo sup over centers of `P[|sum a_j c_j - x| <= R]`.
    pub max_prob: f64,
    /// The anti-concentration envelope `R / sqrt(n)`.
    pub bound: f64,
    /// Fitted constant `max_prob sqrt(n) / R`.
    pub fitted_c: f64,
}

/// Anti-concentration check: the sup is estimated by binning samples into
/// cells of side `R` and scanning 3x3 neighborhoods (a slight over-cover
/// of the radius-R disk, so the estimate errs conservatively upward).
pub fn lkr_check(
    law: CoefficientLaw,
    weights: &[C64],
    r_ball: f64,
    trials: u64,
    seed: u64,
) -> Result<LkrReport, Error> {
    if r_ball < 1.0 {
        return Err(Error::InvalidArgument(format!("R = {r_ball} < 1")));
    }
    for c in weights {
        if c.norm() < 1.0 {
            return Err(Error::InvalidArgument("|c_j| >= 1 required".into()));
        }
    }
    let n = weights.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    let draw = {
        move |rng: &mut ChaCha8Rng| -> f64 {
            // Reuse the polynomial sampler's laws through a length-1 wrapper.
            match law.kind {
                crate::sampling::LawKind::Gaussian => {
                    rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)
                }
                crate::sampling::LawKind::Rademacher => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                crate::sampling::LawKind::Uniform3 => (rng.random_range(0..3u32) as f64) - 1.0,
                crate::sampling::LawKind::UniformContinuous => {
                    rng.random_range(-law.half_width..=law.half_width)
                }
            }
        }
    };
    for _ in 0..trials {
        let mut s = C64::new(0.0, 0.0);
        for c in weights {
            s += draw(&mut rng) * c;
        }
        let key = (
            (s.re / r_ball).floor() as i64,
            (s.im / r_ball).floor() as i64,
        );
        *cells.entry(key).or_default() += 1;
    }
    let mut max_count = 0u64;
    for &(cx, cy) in cells.keys() {
        let mut neighborhood = 0;
        for dx in -1..=1 {
            for dy in -1..=1 {
                neighborhood += cells.get(&(cx + dx, cy + dy)).copied().unwrap_or(0);
            }
        }
        max_count = max_count.max(neighborhood);
    }
    let max_prob = max_count as f64 / trials as f64;
    let bound = r_ball / (n as f64).sqrt();
    Ok(LkrReport {
        max_prob,
        bound,
        fitted_c: max_prob / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{make_law, LawKind};

    #[test]
    fn ks_distance_edge_cases() {
        // Single sample at the model median.
        let one = EmpiricalCdf::new(vec![1.0]).unwrap();
        let d = ks_distance(&one, |_| 0.5);
        assert!((d - 0.5).abs() < 1e-15);
        // Degenerate survival = 1 everywhere.
        let some = EmpiricalCdf::new(vec![0.5, 1.0, 2.0]).unwrap();
        let d = ks_distance(&some, |_| 1.0);
        assert!((d - 1.0).abs() < 1e-15);
        assert!(EmpiricalCdf::new(vec![]).is_err());
    }

    #[test]
    fn ks_against_the_generating_law() {
        // Inverse-transform sample from survival exp(-s^4): the KS stat is
        // below the 99% Kolmogorov quantile 1.63/sqrt(N).
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let survival = |s: f64| (-s.powi(4)).exp();
        let sample: Vec<f64> = (0..10_000)
            .map(|_| {
                let u: f64 = rng.random();
                (-(1.0 - u).ln()).powf(0.25)
            })
            .collect();
        let ecdf = EmpiricalCdf::new(sample).unwrap();
        let d = ks_distance(&ecdf, survival);
        assert!(d <= 1.63 / 100.0, "ks {d}");
        assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn two_sample_ks_on_identical_samples_is_zero() {
        let a = EmpiricalCdf::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = EmpiricalCdf::new(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &b), 0.0);
        let c = EmpiricalCdf::new(vec![1.0, 1.0, 4.0, 4.0]).unwrap();
        let d = EmpiricalCdf::new(vec![1.0, 1.0, 1.0, 4.0]).unwrap();
        assert!((ks_two_sample(&c, &d) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn factorial_moment_basics() {
        let zeros = factorial_moments(&[0; 50], 3, None).unwrap();
        assert!(zeros.entries.iter().all(|e| e.empirical == 0.0));

        let twos = factorial_moments(&[2; 40], 2, None).unwrap();
        assert_eq!(twos.entries[1].empirical, 2.0); // (2)_2 = 2
        assert_eq!(twos.entries[0].empirical, 2.0);

        // First moment equals the arithmetic mean exactly.
        let counts = [3, 0, 1, 7, 2, 2];
        let rep = factorial_moments(&counts, 1, None).unwrap();
        let mean = counts.iter().sum::<i64>() as f64 / counts.len() as f64;
        assert_eq!(rep.entries[0].empirical, mean);

        assert!(factorial_moments(&counts, 5, None).is_err());
    }

    #[test]
    fn factorial_moments_of_synthetic_poisson() {
        // Poisson(0.7) by CDF inversion: (X)_m estimates 0.7^m within 4 SE.
        let lambda = 0.7f64;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let counts: Vec<i64> = (0..100_000)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = (-lambda).exp();
                let mut p = acc;
                let mut k = 0i64;
                while u > acc && k < 100 {
                    k += 1;
                    p *= lambda / k as f64;
                    acc += p;
                }
                k
            })
            .collect();
        let rep = factorial_moments(&counts, 3, Some(lambda)).unwrap();
        for e in &rep.entries {
            let theory = e.theory.unwrap();
            assert!(
                (e.empirical - theory).abs() <= 4.0 * e.std_error,
                "m={}: {} vs {theory} (se {})",
                e.order,
                e.empirical,
                e.std_error
            );
        }
    }

    #[test]
    fn histogram_totals_and_mixed_degrees() {
        let record = |n: u32, gaps: Vec<f64>| GapRecord {
            trial: 0,
            seed: 0,
            n,
            law: "gaussian".into(),
            m_n_scaled: 1.0,
            gaps,
            x_counts: BTreeMap::new(),
            disk_min_gap: None,
            max_residual: 0.0,
        };
        let recs = vec![
            record(100, vec![0.5, 1.2, 1.9]),
            record(100, vec![0.7, 2.5]),
        ];
        let rep = gap_intensity_histogram(&recs, &[(0.0, 1.0), (1.0, 2.0)], 5.0).unwrap();
        let total: u64 = rep.bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 4); // 2.5 falls outside the binned range
        assert_eq!(rep.bins[0].count, 2);
        assert_eq!(rep.bins[1].count, 2);
        // Theory ratio between [1,2] and [0,1] is 15.
        assert!((rep.bins[1].theory / rep.bins[0].theory - 15.0).abs() < 1e-9);

        let mixed = vec![record(100, vec![]), record(200, vec![])];
        assert!(gap_intensity_histogram(&mixed, &[(0.0, 1.0)], 5.0).is_err());
        let empty: Vec<GapRecord> = vec![];
        assert!(gap_intensity_histogram(&empty, &[(0.0, 1.0)], 5.0).is_err());
    }

    #[test]
    fn toy_scaling_slope_is_four() {
        let n = 256u32;
        let nf = n as f64;
        let radii: Vec<f64> = (0..5).map(|i| (0.45 + 0.13 * i as f64) / nf).collect();
        let rep =
            scaling_regression_toy(n, 1.0, C64::from_polar(1.0, 1.0), &radii, 150_000, 7).unwrap();
        assert!(
            (rep.slope - 4.0).abs() <= 0.3,
            "slope {} (fractions {:?})",
            rep.slope,
            rep.hit_fractions
        );
    }

    #[test]
    fn toy_slope_is_invariant_under_radius_doubling() {
        // Doubling all radii only shifts the log-log line horizontally.
        let n = 256u32;
        let nf = n as f64;
        let radii: Vec<f64> = (0..4).map(|i| (0.3 + 0.07 * i as f64) / nf).collect();
        let doubled: Vec<f64> = radii.iter().map(|r| 2.0 * r).collect();
        let a =
            scaling_regression_toy(n, 1.0, C64::from_polar(1.0, 1.0), &radii, 150_000, 3).unwrap();
        let b = scaling_regression_toy(n, 1.0, C64::from_polar(1.0, 1.0), &doubled, 150_000, 3)
            .unwrap();
        assert!(
            (a.slope - b.slope).abs() < 0.5,
            "{} vs {}",
            a.slope,
            b.slope
        );
    }

    #[test]
    fn root_scaling_radius_validation() {
        let law = make_law(LawKind::Gaussian, None).unwrap();
        let err = scaling_regression_roots(law, 256, C64::from_polar(1.0, 1.0), &[1.0], 10, 1, 1);
        assert!(err.is_err());
    }

    #[test]
    fn lkr_rademacher_bound() {
        // c_j = 1, n = 400, R = 1: max_prob well below 5/sqrt(400) = 0.25.
        let law = make_law(LawKind::Rademacher, None).unwrap();
        let weights = vec![C64::new(1.0, 0.0); 400];
        let rep = lkr_check(law, &weights, 1.0, 40_000, 5).unwrap();
        assert!(rep.max_prob <= 0.25, "max_prob {}", rep.max_prob);
        assert!(rep.max_prob > 0.0);

        // n = 1: the bound is vacuous but probabilities stay probabilities.
        let one = lkr_check(law, &weights[..1], 1.0, 1000, 5).unwrap();
        assert!(one.max_prob <= 1.0);
        assert!(lkr_check(law, &weights, 0.5, 10, 1).is_err());
    }

    #[test]
    fn lkr_probability_decreases_with_n() {
        let law = make_law(LawKind::Rademacher, None).unwrap();
        let mut last = 1.1f64;
        for n in [100usize, 400, 1600] {
            let weights = vec![C64::new(1.0, 0.0); n];
            let rep = lkr_check(law, &weights, 1.0, 30_000, 11).unwrap();
            assert!(
                rep.max_prob < last * 1.05,
                "n={n}: {} after {last}",
                rep.max_prob
            );
            last = rep.max_prob;
        }
    }
}
