//! The annulus discretization: smooth-point classification, the net with
//! its three rectangle sizes, quadratic root prediction, the events
//! `A_z(U)`, `A_z+-(U)` and the net counters `X_n+-`.

use crate::intervals::IntervalSet;
use crate::polyeval::{eval_derivatives, EvalBundle};
use crate::sampling::PolynomialSample;
use crate::{gap_scale, Error, C64};
use serde::Serialize;

/// Polar rectangle: radius interval times angle interval, intersected with
/// the upper half-plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolarRect {
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl PolarRect {
    pub fn contains(&self, w: C64) -> bool {
        if w.im <= 0.0 && self.theta_min > 0.0 {
            return false;
        }
        let r = w.norm();
        let theta = w.arg();
        r >= self.r_min && r <= self.r_max && theta >= self.theta_min && theta <= self.theta_max
    }
}

/// One net point with its three nested rectangles.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NetPoint {
    pub z: C64,
    pub a_index: u32,
    pub b_index: u32,
    pub is_smooth: bool,
    pub rect: PolarRect,
    pub rect_inner: PolarRect,
    pub rect_sharp: PolarRect,
}

/// Net geometry for `Omega_K`: `delta = n^{-5/4-beta}`,
/// `M1 = ceil(4K/(delta n))` radial steps, `M2 = ceil(4/delta)` angular
/// steps over the half circle.
#[derive(Debug, Clone, Copy)]
pub struct NetGrid {
    pub k: f64,
    pub n: u32,
    pub beta: f64,
    /// Smoothness level `A`.
    pub smooth_a: f64,
    pub m1: u32,
    pub m2: u32,
    pub delta: f64,
    /// Cell-fraction margin of the inner rectangle. The nominal
    /// `n^{-beta/2}` exceeds 1/2 for any desk-scale `(n, beta)`, which
    /// would empty the rectangle, so it is capped at 1/8.
    pub margin_inner: f64,
    /// Margin of the sharp rectangle, `n^{-3 beta/4}` capped at 1/16.
    pub margin_sharp: f64,
}

/// Default exponent for the smoothness level `A = n^{0.15}`.
pub const DEFAULT_SMOOTH_EXP: f64 = 0.15;

pub const DEFAULT_NET_CAP: u64 = 100_000_000;

impl NetGrid {
    pub fn new(k: f64, n: u32, beta: f64, smooth_a: f64, cap: u64) -> Result<Self, Error> {
        if n < 16 {
            return Err(Error::DegreeTooSmall { min: 16, got: n });
        }
        let nf = n as f64;
        let delta = nf.powf(-1.25 - beta);
        let m1 = (4.0 * k / (delta * nf)).ceil() as u32;
        let m2 = (4.0 / delta).ceil() as u32;
        let points = (m1 as u64 + 1) * m2 as u64;
        if points > cap {
            return Err(Error::NetTooLarge { points, cap });
        }
        Ok(NetGrid {
            k,
            n,
            beta,
            smooth_a,
            m1,
            m2,
            delta,
            margin_inner: nf.powf(-beta / 2.0).min(0.125),
            margin_sharp: nf.powf(-3.0 * beta / 4.0).min(0.0625),
        })
    }

    /// Radial coordinate of column `a` (0..=m1).
    fn radius(&self, a: f64) -> f64 {
        let band = self.k / self.n as f64;
        1.0 - band + 2.0 * band * a / self.m1 as f64
    }

    fn angle(&self, b: f64) -> f64 {
        std::f64::consts::PI * b / self.m2 as f64
    }

    fn rect_with_margin(&self, a: u32, b: u32, margin: f64) -> PolarRect {
        PolarRect {
            r_min: self.radius(a as f64 - 0.5 + margin),
            r_max: self.radius(a as f64 + 0.5 - margin),
            theta_min: self.angle(b as f64 - 0.5 + margin),
            theta_max: self.angle(b as f64 + 0.5 - margin),
        }
    }

    /// The net point at indices `(a, b)`, `a in 0..=m1`, `b in 1..=m2`.
    /// Smoothness is evaluated with effective degree `n`: inside `Omega_K`
    /// all effective degrees are of order `n`.
    pub fn point(&self, a: u32, b: u32) -> NetPoint {
        let z = C64::from_polar(self.radius(a as f64), self.angle(b as f64));
        NetPoint {
            z,
            a_index: a,
            b_index: b,
            is_smooth: is_smooth_with_degree(z.arg(), self.smooth_a, self.n as f64),
            rect: self.rect_with_margin(a, b, 0.0),
            rect_inner: self.rect_with_margin(a, b, self.margin_inner),
            rect_sharp: self.rect_with_margin(a, b, self.margin_sharp),
        }
    }

    pub fn point_count(&self) -> u64 {
        (self.m1 as u64 + 1) * self.m2 as u64
    }

    /// Indices of net points within `radius` of `center`, clipped to the
    /// grid.
    pub fn indices_within(&self, center: C64, radius: f64) -> Vec<(u32, u32)> {
        let band = self.k / self.n as f64;
        let r_step = 2.0 * band / self.m1 as f64;
        let t_step = std::f64::consts::PI / self.m2 as f64;
        let r = center.norm();
        let theta = center.arg();
        let a_center = ((r - (1.0 - band)) / r_step).round() as i64;
        let b_center = (theta / t_step).round() as i64;
        let a_span = (radius / r_step).ceil() as i64 + 1;
        let t_span = (radius / (t_step * r.max(0.5))).ceil() as i64 + 1;
        let a0 = (a_center - a_span).max(0);
        let a1 = (a_center + a_span).min(self.m1 as i64);
        let b0 = (b_center - t_span).max(1);
        let b1 = (b_center + t_span).min(self.m2 as i64);
        let mut out = Vec::new();
        for a in a0..=a1 {
            for b in b0..=b1 {
                let p = C64::from_polar(self.radius(a as f64), self.angle(b as f64));
                if (p - center).norm() <= radius {
                    out.push((a as u32, b as u32));
                }
            }
        }
        out
    }
}

/// Materializes the full net. Refuses nets above `cap` points; audits of
/// large nets should stream through [`NetGrid::point`] instead.
pub fn build_net(
    k: f64,
    n: u32,
    beta: f64,
    smooth_a: f64,
    cap: u64,
) -> Result<Vec<NetPoint>, Error> {
    let grid = NetGrid::new(k, n, beta, smooth_a, cap)?;
    let mut points = Vec::with_capacity(grid.point_count() as usize);
    for a in 0..=grid.m1 {
        for b in 1..=grid.m2 {
            points.push(grid.point(a, b));
        }
    }
    Ok(points)
}

fn dist_to_integers(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn is_smooth_with_degree(theta: f64, a_level: f64, d: f64) -> bool {
    let theta = theta.abs();
    let p_max = (a_level + 1.0).floor() as u32;
    let bound = a_level / d;
    (1..=p_max).all(|p| dist_to_integers(p as f64 * theta / std::f64::consts::PI) >= bound)
}

/// `A`-smoothness of a point: `dist(p theta / pi, Z) >= A / d_n(z)` for
/// every integer `p in [1, A+1]`. Points with `|z| > 1` are tested through
/// `1/z`. Real-axis points are never smooth (p = 1 already fails).
pub fn is_smooth(z: C64, a_level: f64, n: u32) -> bool {
    let z = if z.norm() > 1.0 { 1.0 / z } else { z };
    let d = crate::polyeval::effective_degree(z, n);
    is_smooth_with_degree(z.arg(), a_level, d)
}

/// `gamma`-spread: pairwise distances at least `gamma / n`.
pub fn is_spread(zs: &[C64], gamma: f64, n: u32) -> bool {
    let bound = gamma / n as f64;
    for i in 0..zs.len() {
        for j in (i + 1)..zs.len() {
            if (zs[i] - zs[j]).norm() < bound {
                return false;
            }
        }
    }
    true
}

/// Linear and quadratic root predictions from one evaluation bundle.
#[derive(Debug, Clone, Copy)]
pub struct PredictionPair {
    /// `z - f/f'`: where the linear approximation puts a root.
    pub alpha_hat: C64,
    /// `z + f/f' - 2 f'/f''`: where the quadratic approximation puts the
    /// companion root.
    pub alpha_prime_hat: C64,
    pub f_over_fprime: C64,
    pub two_fprime_over_fsecond: C64,
}

pub fn predict_roots(bundle: &EvalBundle) -> Result<PredictionPair, Error> {
    if bundle.f1.norm() == 0.0 {
        return Err(Error::DegeneratePrediction("f' = 0"));
    }
    if bundle.f2.norm() == 0.0 {
        return Err(Error::DegeneratePrediction("f'' = 0"));
    }
    let f_over_fprime = bundle.f / bundle.f1;
    let two_fprime_over_fsecond = 2.0 * bundle.f1 / bundle.f2;
    Ok(PredictionPair {
        alpha_hat: bundle.z - f_over_fprime,
        alpha_prime_hat: bundle.z + f_over_fprime - two_fprime_over_fsecond,
        f_over_fprime,
        two_fprime_over_fsecond,
    })
}

/// `(U+, U-)`: the `1/log n` blow-up and blow-down of `U`.
pub fn u_variants(u: &IntervalSet, n: u32) -> (IntervalSet, IntervalSet) {
    let eps = 1.0 / (n as f64).ln();
    (u.blow_up(eps), u.blow_down(eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventVariant {
    Base,
    Plus,
    Minus,
}

/// The event `A_z(U)` and its variants at a net point: the linear
/// prediction `z - f/f'` lands in the inner (base, minus) or sharp (plus)
/// rectangle, the scaled companion distance `n^{5/4} 2|f'|/|f''|` lies in
/// `U` / `U+` / `U-`, and `|f'| >= n^{5/4}/log n`.
pub fn event_a_z(
    bundle: &EvalBundle,
    point: &NetPoint,
    u: &IntervalSet,
    n: u32,
    variant: EventVariant,
) -> bool {
    if bundle.f1.norm() == 0.0 || bundle.f2.norm() == 0.0 {
        return false;
    }
    let scale = gap_scale(n);
    if bundle.f1.norm() < scale / (n as f64).ln() {
        return false;
    }
    let alpha_hat = bundle.z - bundle.f / bundle.f1;
    let rect_ok = match variant {
        EventVariant::Base | EventVariant::Minus => point.rect_inner.contains(alpha_hat),
        EventVariant::Plus => point.rect_sharp.contains(alpha_hat),
    };
    if !rect_ok {
        return false;
    }
    let ratio = scale * 2.0 * bundle.f1.norm() / bundle.f2.norm();
    match variant {
        EventVariant::Base => u.contains(ratio),
        EventVariant::Plus => u_variants(u, n).0.contains(ratio),
        EventVariant::Minus => u_variants(u, n).1.contains(ratio),
    }
}

/// Counts unordered pairs of points within `max_dist`, sweeping the
/// angle-sorted list so only nearby candidates are compared.
fn close_pair_count(points: &mut [C64], max_dist: f64) -> u64 {
    points.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    let mut count = 0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            // Chord length bounds angular separation: for radii near 1,
            // |z - w| >= 0.4 * dtheta over the half-circle.
            let dtheta = (points[j].arg() - points[i].arg()).abs();
            if dtheta * 0.4 > max_dist {
                break;
            }
            if (points[i] - points[j]).norm() <= max_dist {
                count += 1;
            }
        }
    }
    count
}

/// `X_n+-(U)`: unordered pairs of smooth net points within
/// `log n / n^{5/4}` of each other where the event fires at both.
pub fn count_x_pm(
    poly: &PolynomialSample,
    net: &[NetPoint],
    u: &IntervalSet,
    n: u32,
    variant: EventVariant,
) -> u64 {
    let mut fired: Vec<C64> = Vec::new();
    for p in net {
        if !p.is_smooth {
            continue;
        }
        let bundle = eval_derivatives(poly, p.z);
        if event_a_z(&bundle, p, u, n, variant) {
            fired.push(p.z);
        }
    }
    let max_dist = (n as f64).ln() / gap_scale(n);
    close_pair_count(&mut fired, max_dist)
}

/// Event outcomes over a windowed subset of the net. Used when exhaustive
/// evaluation is too expensive and firing points are known to lie near
/// close root pairs, which the linear-prediction containment forces under
/// the good event.
#[derive(Debug, Clone, Default)]
pub struct WindowEvents {
    /// Base-variant hits with their predictions.
    pub base: Vec<(C64, PredictionPair)>,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    /// Net points examined (after dedup).
    pub examined: u64,
}

/// Evaluates the three event variants on all net points within `radius`
/// of any of `centers`.
pub fn window_events(
    poly: &PolynomialSample,
    grid: &NetGrid,
    u: &IntervalSet,
    centers: &[C64],
    radius: f64,
) -> WindowEvents {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = WindowEvents::default();
    for &c in centers {
        for (a, b) in grid.indices_within(c, radius) {
            if !seen.insert((a, b)) {
                continue;
            }
            out.examined += 1;
            let p = grid.point(a, b);
            if !p.is_smooth {
                continue;
            }
            let bundle = eval_derivatives(poly, p.z);
            if event_a_z(&bundle, &p, u, grid.n, EventVariant::Plus) {
                out.plus.push(p.z);
            }
            if event_a_z(&bundle, &p, u, grid.n, EventVariant::Minus) {
                out.minus.push(p.z);
            }
            if event_a_z(&bundle, &p, u, grid.n, EventVariant::Base) {
                if let Ok(pred) = predict_roots(&bundle) {
                    out.base.push((p.z, pred));
                }
            }
        }
    }
    out
}

impl WindowEvents {
    /// `(X+, X-)` restricted to the evaluated windows.
    pub fn x_counts(&mut self, n: u32) -> (u64, u64) {
        let max_dist = (n as f64).ln() / gap_scale(n);
        (
            close_pair_count(&mut self.plus, max_dist),
            close_pair_count(&mut self.minus, max_dist),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{make_law, LawKind};

    fn grid(n: u32, k: f64) -> NetGrid {
        NetGrid::new(
            k,
            n,
            0.05,
            (n as f64).powf(DEFAULT_SMOOTH_EXP),
            DEFAULT_NET_CAP,
        )
        .unwrap()
    }

    #[test]
    fn smoothness_examples() {
        // theta = pi/2: p = 2 gives dist(1, Z) = 0.
        assert!(!is_smooth(
            C64::from_polar(1.0, std::f64::consts::FRAC_PI_2),
            2.0,
            100
        ));
        // Real axis fails at p = 1.
        assert!(!is_smooth(C64::new(0.99, 0.0), 1.0, 100));
        // theta = 1 rad: distances 0.3183, 0.3634, 0.0451 all above 0.02.
        assert!(is_smooth(C64::from_polar(1.0, 1.0), 2.0, 100));
    }

    #[test]
    fn smoothness_outside_the_disk_uses_the_inverse() {
        let z = C64::from_polar(1.2, 0.77);
        let inv = 1.0 / z;
        for a in [1.5, 3.0, 8.0] {
            assert_eq!(is_smooth(z, a, 500), is_smooth(inv, a, 500));
        }
    }

    #[test]
    fn spread_examples() {
        let n = 100;
        let z = C64::new(1.0, 0.5);
        assert!(!is_spread(&[z, z], 0.5, n));
        let w = z + C64::new(2.0 / n as f64, 0.0);
        assert!(is_spread(&[z, w], 1.0, n));
        let w = z + C64::new(0.5 / n as f64, 0.0);
        assert!(!is_spread(&[z, w], 1.0, n));
    }

    #[test]
    fn net_cardinality_matches_the_asymptotic_count() {
        let n = 400u32;
        let k = 2.0;
        let g = grid(n, k);
        let expected = 16.0 * k * (n as f64).powf(1.5 + 2.0 * 0.05);
        let got = g.point_count() as f64;
        let slack = (g.m1 as f64 + g.m2 as f64 + 2.0) * 2.0;
        assert!(
            (got - expected).abs() <= slack,
            "count {got} vs {expected} (slack {slack})"
        );
    }

    #[test]
    fn net_points_stay_in_the_annulus() {
        let n = 64u32;
        let g = grid(n, 1.0);
        let band = 1.0 / n as f64;
        for a in [0, g.m1 / 2, g.m1] {
            for b in [1, g.m2 / 2, g.m2] {
                let p = g.point(a, b);
                let r = p.z.norm();
                assert!(r >= 1.0 - band - 1e-12 && r <= 1.0 + band + 1e-12);
                // Nested rectangles.
                assert!(
                    p.rect.r_min <= p.rect_sharp.r_min && p.rect_sharp.r_min <= p.rect_inner.r_min
                );
                assert!(
                    p.rect_inner.r_max <= p.rect_sharp.r_max && p.rect_sharp.r_max <= p.rect.r_max
                );
                assert!(p.rect_inner.contains(p.z));
            }
        }
    }

    #[test]
    fn net_too_large_is_refused() {
        let err = NetGrid::new(10.0, 4096, 0.3, 4.0, DEFAULT_NET_CAP);
        assert!(matches!(err, Err(Error::NetTooLarge { .. })));
    }

    #[test]
    fn rectangles_tile_the_annulus() {
        // Away from the angular boundary sliver, every annulus point lies
        // in exactly one full rectangle (boundary ties excluded).
        let n = 80u32;
        let g = grid(n, 1.5);
        let band = 1.5 / n as f64;
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let t_step = std::f64::consts::PI / g.m2 as f64;
        let mut checked = 0;
        for _ in 0..20_000 {
            let r = 1.0 - band + 2.0 * band * next();
            let theta = t_step / 2.0 + (std::f64::consts::PI - t_step) * next();
            let w = C64::from_polar(r, theta);
            let a_c = ((r - (1.0 - band)) / (2.0 * band / g.m1 as f64)).round() as i64;
            let b_c = (theta / t_step).round() as i64;
            let mut containing = 0;
            let mut near_boundary = false;
            for da in -1..=1i64 {
                for db in -1..=1i64 {
                    let (a, b) = (a_c + da, b_c + db);
                    if a < 0 || a > g.m1 as i64 || b < 1 || b > g.m2 as i64 {
                        continue;
                    }
                    let rect = g.rect_with_margin(a as u32, b as u32, 0.0);
                    if rect.contains(w) {
                        containing += 1;
                    }
                    let s = (r - rect.r_min) / (rect.r_max - rect.r_min);
                    let t = (theta - rect.theta_min) / (rect.theta_max - rect.theta_min);
                    if s.abs() < 1e-9
                        || (s - 1.0).abs() < 1e-9
                        || t.abs() < 1e-9
                        || (t - 1.0).abs() < 1e-9
                    {
                        near_boundary = true;
                    }
                }
            }
            if !near_boundary {
                assert_eq!(containing, 1, "point {w} contained {containing} times");
                checked += 1;
            }
        }
        assert!(checked > 19_000);
    }

    #[test]
    fn non_smooth_fraction_shrinks_with_n() {
        let frac = |n: u32| {
            let a_level = (n as f64).powf(DEFAULT_SMOOTH_EXP);
            let total = 40_000;
            let bad = (0..total)
                .filter(|i| {
                    let theta = std::f64::consts::PI * (*i as f64 + 0.5) / total as f64;
                    !is_smooth_with_degree(theta, a_level, n as f64)
                })
                .count();
            bad as f64 / total as f64
        };
        let f3 = frac(1_000);
        let f4 = frac(10_000);
        assert!(f4 < f3, "fraction did not shrink: {f3} -> {f4}");
    }

    #[test]
    fn prediction_on_constructed_quadratics() {
        // f = (z-1)(z-1.1) evaluated at the root z = 1.
        let bundle = EvalBundle {
            z: C64::new(1.0, 0.0),
            f: C64::new(0.0, 0.0),
            f1: C64::new(-0.1, 0.0),
            f2: C64::new(2.0, 0.0),
            f3: C64::new(0.0, 0.0),
        };
        let pred = predict_roots(&bundle).unwrap();
        assert!((pred.alpha_hat - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((pred.alpha_prime_hat - C64::new(1.1, 0.0)).norm() < 1e-12);

        // f = z^2 at z = 1.
        let bundle = EvalBundle {
            z: C64::new(1.0, 0.0),
            f: C64::new(1.0, 0.0),
            f1: C64::new(2.0, 0.0),
            f2: C64::new(2.0, 0.0),
            f3: C64::new(0.0, 0.0),
        };
        let pred = predict_roots(&bundle).unwrap();
        assert!((pred.alpha_hat - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((pred.alpha_prime_hat - C64::new(-0.5, 0.0)).norm() < 1e-15);

        let degenerate = EvalBundle {
            z: C64::new(1.0, 0.0),
            f: C64::new(1.0, 0.0),
            f1: C64::new(0.0, 0.0),
            f2: C64::new(2.0, 0.0),
            f3: C64::new(0.0, 0.0),
        };
        assert!(predict_roots(&degenerate).is_err());
    }

    #[test]
    fn u_variant_arithmetic() {
        // 1/log n = 0.1 at n = e^10 ~ 22026.
        let u = IntervalSet::interval(1.0, 2.0).unwrap();
        let (up, down) = u_variants(&u, 22_026);
        assert!((up.intervals()[0].0 - 0.9).abs() < 1e-3);
        assert!((up.intervals()[0].1 - 2.1).abs() < 1e-3);
        assert!((down.intervals()[0].0 - 1.1).abs() < 1e-3);
        assert!((down.intervals()[0].1 - 1.9).abs() < 1e-3);
        assert!(down.subset_of(&u) && u.subset_of(&up));
        // Intervals shorter than 2/log n vanish from U-.
        let tiny = IntervalSet::interval(1.0, 1.05).unwrap();
        assert!(u_variants(&tiny, 22_026).1.is_empty());
    }

    #[test]
    fn event_fires_on_a_constructed_bundle() {
        let n = 256u32;
        let g = grid(n, 1.0);
        // A smooth net point away from the axis.
        let p = (1..g.m2)
            .map(|b| g.point(g.m1 / 2, b))
            .find(|p| p.is_smooth && p.z.arg() > 0.7)
            .unwrap();
        let scale = gap_scale(n);
        let f1 = C64::from_polar(10.0 * scale, 0.3);
        // ratio 2|f'|/|f''| = 1.5 n^{-5/4}, inside U = [1, 2].
        let f2 = 2.0 * f1 / C64::from_polar(1.5 / scale, 0.0);
        let bundle = EvalBundle {
            z: p.z,
            f: C64::new(0.0, 0.0),
            f1,
            f2,
            f3: C64::new(0.0, 0.0),
        };
        let u = IntervalSet::interval(1.0, 2.0).unwrap();
        assert!(event_a_z(&bundle, &p, &u, n, EventVariant::Base));
        assert!(event_a_z(&bundle, &p, &u, n, EventVariant::Plus));
        assert!(event_a_z(&bundle, &p, &u, n, EventVariant::Minus));

        // |f'| below threshold kills the event regardless.
        let weak = EvalBundle {
            f1: C64::from_polar(scale / (n as f64).ln() / 2.0, 0.3),
            ..bundle
        };
        assert!(!event_a_z(&weak, &p, &u, n, EventVariant::Base));

        // Ratio outside U.
        let u_far = IntervalSet::interval(3.0, 4.0).unwrap();
        assert!(!event_a_z(&bundle, &p, &u_far, n, EventVariant::Base));
    }

    #[test]
    fn event_variants_are_nested() {
        // minus => base => plus on randomized bundles at random net points.
        let n = 256u32;
        let g = grid(n, 1.0);
        let u = IntervalSet::interval(0.5, 2.0).unwrap();
        let scale = gap_scale(n);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut fired = [0u64; 3];
        for _ in 0..30_000 {
            let a = (next() * (g.m1 as f64 + 1.0)) as u32;
            let b = 1 + (next() * (g.m2 as f64 - 1.0)) as u32;
            let p = g.point(a, b);
            let f1 = C64::from_polar(scale * (0.1 + 10.0 * next()), next() * 6.28);
            let ratio = (3.0 * next()).max(1e-6) / scale;
            let f2 = 2.0 * f1 / C64::from_polar(ratio, 0.0);
            let offset = C64::from_polar(2.0 * g.delta * next(), next() * 6.28);
            let bundle = EvalBundle {
                z: p.z,
                f: f1 * offset,
                f1,
                f2,
                f3: C64::new(0.0, 0.0),
            };
            let minus = event_a_z(&bundle, &p, &u, n, EventVariant::Minus);
            let base = event_a_z(&bundle, &p, &u, n, EventVariant::Base);
            let plus = event_a_z(&bundle, &p, &u, n, EventVariant::Plus);
            assert!(!minus || base, "minus fired without base");
            assert!(!base || plus, "base fired without plus");
            fired[0] += minus as u64;
            fired[1] += base as u64;
            fired[2] += plus as u64;
        }
        assert!(fired[2] > 0, "no events fired in 30k draws");
        assert!(fired[0] <= fired[1] && fired[1] <= fired[2]);
    }

    #[test]
    fn event_is_monotone_in_u() {
        let n = 256u32;
        let g = grid(n, 1.0);
        let p = g.point(g.m1 / 2, g.m2 / 3);
        let scale = gap_scale(n);
        let f1 = C64::from_polar(10.0 * scale, 1.0);
        let f2 = 2.0 * f1 / C64::from_polar(1.5 / scale, 0.0);
        let bundle = EvalBundle {
            z: p.z,
            f: C64::new(0.0, 0.0),
            f1,
            f2,
            f3: C64::new(0.0, 0.0),
        };
        let small = IntervalSet::interval(1.0, 2.0).unwrap();
        let big = IntervalSet::interval(0.5, 3.0).unwrap();
        for v in [EventVariant::Base, EventVariant::Plus, EventVariant::Minus] {
            if event_a_z(&bundle, &p, &small, n, v) {
                assert!(event_a_z(&bundle, &p, &big, n, v));
            }
        }
    }

    #[test]
    fn x_pm_on_quiet_samples_is_zero() {
        // Without engineered close roots the events essentially never fire.
        let law = make_law(LawKind::Gaussian, None).unwrap();
        let n = 64u32;
        let u = IntervalSet::interval(0.0, 2.0).unwrap();
        let net = build_net(1.0, n, 0.05, (n as f64).powf(0.15), DEFAULT_NET_CAP).unwrap();
        let mut total = 0;
        for seed in 0..5 {
            let poly = crate::sampling::sample_polynomial(law, n, seed).unwrap();
            let plus = count_x_pm(&poly, &net, &u, n, EventVariant::Plus);
            let minus = count_x_pm(&poly, &net, &u, n, EventVariant::Minus);
            assert!(minus <= plus);
            total += plus;
        }
        assert_eq!(total, 0);
    }
}
