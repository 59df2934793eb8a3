//! Evaluation of `f_n` and its first three derivatives, the effective
//! degree, and the quasi-random bound on derivative maxima.

use crate::sampling::PolynomialSample;
use crate::C64;

/// `f_n` and its first three derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct EvalBundle {
    pub z: C64,
    pub f: C64,
    pub f1: C64,
    pub f2: C64,
    pub f3: C64,
}

/// Horner evaluation of `f, f', f'', f'''` with a fixed high-to-low
/// summation order, so results are bit-stable across runs.
pub fn eval_derivatives(poly: &PolynomialSample, z: C64) -> EvalBundle {
    eval_derivatives_coeffs(&poly.coeffs, z)
}

pub(crate) fn eval_derivatives_coeffs(coeffs: &[f64], z: C64) -> EvalBundle {
    let mut f = C64::new(0.0, 0.0);
    let mut f1 = C64::new(0.0, 0.0);
    let mut f2 = C64::new(0.0, 0.0);
    let mut f3 = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        f3 = f3 * z + f2;
        f2 = f2 * z + f1;
        f1 = f1 * z + f;
        f = f * z + C64::new(c, 0.0);
    }
    EvalBundle {
        z,
        f,
        f1,
        f2: f2 * 2.0,
        f3: f3 * 6.0,
    }
}

/// Term-by-term reference summation; a deliberately independent route kept
/// for cross-checking the Horner recurrence.
pub fn eval_naive(poly: &PolynomialSample, z: C64) -> EvalBundle {
    let mut f = C64::new(0.0, 0.0);
    let mut f1 = C64::new(0.0, 0.0);
    let mut f2 = C64::new(0.0, 0.0);
    let mut f3 = C64::new(0.0, 0.0);
    for (k, &c) in poly.coeffs.iter().enumerate() {
        let k = k as f64;
        let zk = z.powf(k);
        f += c * zk;
        if k >= 1.0 {
            f1 += c * k * z.powf(k - 1.0);
        }
        if k >= 2.0 {
            f2 += c * k * (k - 1.0) * z.powf(k - 2.0);
        }
        if k >= 3.0 {
            f3 += c * k * (k - 1.0) * (k - 2.0) * z.powf(k - 3.0);
        }
    }
    EvalBundle { z, f, f1, f2, f3 }
}

/// Effective degree `d_n(z) = min(n, 1/(1 - |z|))` for `|z| <= 1`.
/// Callers map `|z| > 1` through `1/z` first.
pub fn effective_degree(z: C64, n: u32) -> f64 {
    let r = z.norm();
    if r >= 1.0 {
        n as f64
    } else {
        (n as f64).min(1.0 / (1.0 - r))
    }
}

/// Outcome of the derivative-maximum check on the circle `|z| = 1 + K/n`.
#[derive(Debug, Clone, Copy)]
pub struct GoodEvent {
    pub holds: bool,
    /// Max of `|f^(j)(z)| / n^{j + 1/2}` over the grid, for j = 0..3.
    pub margins: [f64; 4],
    /// The threshold `log^2 n` the margins are compared against.
    pub threshold: f64,
}

/// Checks `max_j max_z |f^(j)(z)| / n^{j+1/2} <= log^2 n` on a grid of
/// `8 n` equispaced angles on the circle of radius `1 + K/n`. Eightfold
/// oversampling of a degree-n trigonometric polynomial captures the true
/// maximum to about a percent, which is ample against a `log^2 n` threshold.
pub fn check_good_event(poly: &PolynomialSample, k_annulus: f64) -> GoodEvent {
    let n = poly.n as f64;
    let r = 1.0 + k_annulus / n;
    let grid = 8 * poly.n as usize;
    let mut margins = [0.0f64; 4];
    for i in 0..grid {
        let theta = 2.0 * std::f64::consts::PI * (i as f64) / (grid as f64);
        let z = C64::from_polar(r, theta);
        let b = eval_derivatives(poly, z);
        margins[0] = margins[0].max(b.f.norm() / n.powf(0.5));
        margins[1] = margins[1].max(b.f1.norm() / n.powf(1.5));
        margins[2] = margins[2].max(b.f2.norm() / n.powf(2.5));
        margins[3] = margins[3].max(b.f3.norm() / n.powf(3.5));
    }
    let threshold = n.ln().powi(2);
    GoodEvent {
        holds: margins.iter().all(|&m| m <= threshold),
        margins,
        threshold,
    }
}
