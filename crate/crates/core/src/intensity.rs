//! The limiting gap intensity: the moment functions `a_j`, the
//! determinants `Delta_1, Delta_2, eta`, the intensity profile `F`, and the
//! constants `c*(K)`, `c*` with the minimal-gap survival law built on them.
//!
//! `a_j(x) = integral of t^j e^{2xt} over [0,1]`. Closed forms divide by
//! `x^{j+1}`, so below `|x| = 0.25` everything switches to Taylor series;
//! `eta` is a five-term determinant combination whose relative cancellation
//! grows like `(2x)^6` on the positive axis, so it is assembled in
//! double-double arithmetic there.

use crate::dd::Dd;
use crate::intervals::IntervalSet;
use crate::quad;
use crate::Error;
use serde::Serialize;
use std::sync::OnceLock;

/// Series/closed-form switch point for the `a_j`.
pub const X_SWITCH: f64 = 0.25;

/// Above this the direct `F` formula overflows (`a_4^5 ~ e^{10x}`) and a
/// log-space evaluation takes over.
const X_LOG_ROUTE: f64 = 50.0;

const SERIES_TERMS: usize = 32;

// ---------------------------------------------------------------------------
// a_j
// ---------------------------------------------------------------------------

/// Taylor coefficients of `a_j`: `a_j(x) = sum_m c_{j,m} x^m`,
/// `c_{j,m} = 2^m / (m! (j + m + 1))`.
fn series_coeff(j: u32, m: u32) -> f64 {
    let mut c = 1.0 / (j as f64 + m as f64 + 1.0);
    for i in 1..=m {
        c *= 2.0 / i as f64;
    }
    c
}

pub(crate) fn a_series(x: f64, j: u32) -> f64 {
    let mut sum = 0.0;
    for m in (0..SERIES_TERMS as u32).rev() {
        sum = sum * x + series_coeff(j, m);
    }
    sum
}

pub(crate) fn a_closed(x: f64, j: u32) -> f64 {
    let e = (2.0 * x).exp();
    match j {
        0 => (e - 1.0) / (2.0 * x),
        1 => (e * (2.0 * x - 1.0) + 1.0) / (4.0 * x * x),
        2 => (e * (1.0 + 2.0 * x * (x - 1.0)) - 1.0) / (4.0 * x.powi(3)),
        3 => (e * (4.0 * x.powi(3) - 6.0 * x * x + 6.0 * x - 3.0) + 3.0) / (8.0 * x.powi(4)),
        4 => {
            (e * (2.0 * x.powi(4) - 4.0 * x.powi(3) + 6.0 * x * x - 6.0 * x + 3.0) - 3.0)
                / (4.0 * x.powi(5))
        }
        _ => unreachable!(),
    }
}

/// `a_j(x) = integral of t^j e^{2xt} dt over [0,1]`, for `j in 0..=4`,
/// to relative accuracy around 1e-12.
pub fn a_j(x: f64, j: u32) -> Result<f64, Error> {
    if j > 4 {
        return Err(Error::DerivativeIndex(j));
    }
    Ok(if x.abs() < X_SWITCH {
        a_series(x, j)
    } else {
        a_closed(x, j)
    })
}

/// Adaptive quadrature of the defining integral; the independent oracle
/// route for `a_j`.
pub fn a_j_quadrature(x: f64, j: u32) -> Result<f64, Error> {
    if j > 4 {
        return Err(Error::DerivativeIndex(j));
    }
    let f = |t: f64| t.powi(j as i32) * (2.0 * x * t).exp();
    let scale = 1.0f64.max((2.0 * x).exp()) / (j as f64 + 1.0);
    Ok(quad::adaptive(&f, 0.0, 1.0, 1e-13 * scale).0)
}

/// `a_j` summed in double-double. The Taylor series has positive terms for
/// `x >= 0` and cancels about `log10 e^{4x}` digits for `x < 0`; both fit in
/// the 32-digit budget for `|x| <= 50`.
fn a_dd(x: f64, j: u32) -> Dd {
    let x2 = Dd::from(2.0 * x);
    let mut power = Dd::from(1.0); // (2x)^m / m!
    let mut sum = Dd::ZERO;
    let mut m = 0u32;
    loop {
        let term = power.div(Dd::from(j as f64 + m as f64 + 1.0));
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && m > (2.0 * x.abs()) as u32 + 4 {
            break;
        }
        m += 1;
        if m > 700 {
            break;
        }
        power = power.mul(x2).div(Dd::from(m as f64));
    }
    sum
}

// ---------------------------------------------------------------------------
// Delta_1, Delta_2, eta
// ---------------------------------------------------------------------------

fn convolve(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let mut out = vec![0.0; out_len];
    for (i, &ai) in a.iter().enumerate() {
        for (k, &bk) in b.iter().enumerate() {
            if i + k < out_len {
                out[i + k] += ai * bk;
            }
        }
    }
    out
}

struct SmallXSeries {
    delta1: Vec<f64>,
    delta2: Vec<f64>,
    eta: Vec<f64>,
}

/// Series of `Delta_1, Delta_2, eta` composed at the coefficient level, so
/// the leading-order cancellations (eta(0) = 1/2160 out of terms of size
/// 1/15) happen on exact rationals rather than on evaluated floats.
fn small_x_series() -> &'static SmallXSeries {
    static SERIES: OnceLock<SmallXSeries> = OnceLock::new();
    SERIES.get_or_init(|| {
        let len = SERIES_TERMS;
        let a: Vec<Vec<f64>> = (0..=4u32)
            .map(|j| (0..len as u32).map(|m| series_coeff(j, m)).collect())
            .collect();
        let mut delta1 = convolve(&a[1], &a[3], len);
        let a2a2 = convolve(&a[2], &a[2], len);
        for (d, s) in delta1.iter_mut().zip(&a2a2) {
            *d -= s;
        }
        let mut delta2 = convolve(&a[2], &a[4], len);
        let a3a3 = convolve(&a[3], &a[3], len);
        for (d, s) in delta2.iter_mut().zip(&a3a3) {
            *d -= s;
        }
        // eta = a0 a2 a4 - a0 a3^2 - a1^2 a4 + 2 a1 a2 a3 - a2^3
        let mut eta = convolve(&convolve(&a[0], &a[2], len), &a[4], len);
        let t2 = convolve(&a[0], &a3a3, len);
        let t3 = convolve(&convolve(&a[1], &a[1], len), &a[4], len);
        let t4 = convolve(&convolve(&a[1], &a[2], len), &a[3], len);
        let t5 = convolve(&a2a2, &a[2], len);
        for i in 0..len {
            eta[i] += -t2[i] - t3[i] + 2.0 * t4[i] - t5[i];
        }
        SmallXSeries {
            delta1,
            delta2,
            eta,
        }
    })
}

fn eval_series(coeffs: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    for &c in coeffs.iter().rev() {
        sum = sum * x + c;
    }
    sum
}

fn eta_dd(x: f64) -> f64 {
    let a0 = a_dd(x, 0);
    let a1 = a_dd(x, 1);
    let a2 = a_dd(x, 2);
    let a3 = a_dd(x, 3);
    let a4 = a_dd(x, 4);
    a0.mul(a2)
        .mul(a4)
        .sub(a0.mul(a3).mul(a3))
        .sub(a1.mul(a1).mul(a4))
        .add(Dd::from(2.0).mul(a1).mul(a2).mul(a3))
        .sub(a2.mul(a2).mul(a2))
        .to_f64()
}

/// `(Delta_1, Delta_2, eta)` at `x`.
///
/// `Delta_1 = a1 a3 - a2^2`, `Delta_2 = a2 a4 - a3^2`, and `eta` is the
/// determinant of the Hankel matrix of `(a_0..a_4)`.
pub fn deltas_eta(x: f64) -> (f64, f64, f64) {
    if x.abs() < X_SWITCH {
        let s = small_x_series();
        return (
            eval_series(&s.delta1, x),
            eval_series(&s.delta2, x),
            eval_series(&s.eta, x),
        );
    }
    let a1 = a_closed(x, 1);
    let a2 = a_closed(x, 2);
    let a3 = a_closed(x, 3);
    let a4 = a_closed(x, 4);
    let delta1 = a1 * a3 - a2 * a2;
    let delta2 = a2 * a4 - a3 * a3;
    // Positive axis: the five eta terms agree to ~(2x)^6 relative, which
    // plain f64 cannot absorb past x ~ 9. Negative axis cancels mildly and
    // its Taylor route would blow the double-double budget, so f64 is used.
    let eta = if x > 0.0 && x <= 115.0 {
        eta_dd(x)
    } else {
        let a0 = a_closed(x, 0);
        a0 * a2 * a4 - a0 * a3 * a3 - a1 * a1 * a4 + 2.0 * a1 * a2 * a3 - a2 * a2 * a2
    };
    (delta1, delta2, eta)
}

/// The simplified sinh/cosh closed form of `eta`, kept only to
/// cross-validate the Hankel-combination implementation.
pub fn eta_sinh_form(x: f64) -> f64 {
    let inner = 2.0 * x.powi(3) * x.cosh() - x * x * (3.0 + x * x) * x.sinh() + x.sinh().powi(3);
    (3.0 * x).exp() * inner / (16.0 * x.powi(9))
}

/// Cofactor expansion of the 3x3 Hankel determinant of `(a_0..a_4)` in
/// double-double arithmetic. Verification route for `eta`: the five-term
/// combination cancels to roughly `(2x)^6` relative on the positive axis,
/// beyond what f64 oracles can certify at 1e-8.
pub fn eta_oracle_gram(x: f64) -> f64 {
    if x.abs() < X_SWITCH {
        let s = small_x_series();
        return eval_series(&s.eta, x);
    }
    let a: Vec<Dd> = (0..=4).map(|j| a_dd(x, j)).collect();
    let m00 = a[2].mul(a[4]).sub(a[3].mul(a[3]));
    let m01 = a[1].mul(a[4]).sub(a[3].mul(a[2]));
    let m02 = a[1].mul(a[3]).sub(a[2].mul(a[2]));
    a[0].mul(m00).sub(a[1].mul(m01)).add(a[2].mul(m02)).to_f64()
}

/// `a0 - [a1 a2] M^{-1} [a1 a2]^T` with `M = [[a2,a3],[a3,a4]]`: the
/// conditional variance of the first coordinate given the other two, in
/// double-double arithmetic (cancels ~`(2x)^4` relative on the right).
/// Equals `eta / Delta_2`.
pub fn schur_variance(x: f64) -> f64 {
    if x.abs() < X_SWITCH {
        let s = small_x_series();
        return eval_series(&s.eta, x) / eval_series(&s.delta2, x);
    }
    if x < 0.0 {
        // No cancellation on the negative axis; the alternating Taylor
        // series would exhaust the double-double budget past x ~ -20.
        let a: Vec<f64> = (0..=4).map(|j| a_closed(x, j)).collect();
        let delta2 = a[2] * a[4] - a[3] * a[3];
        return a[0] - (a[1] * a[1] * a[4] - 2.0 * a[1] * a[2] * a[3] + a[2].powi(3)) / delta2;
    }
    if x > 50.0 {
        let (_, d2, eta) = deltas_eta(x);
        return eta / d2;
    }
    let a: Vec<Dd> = (0..=4).map(|j| a_dd(x, j)).collect();
    let delta2 = a[2].mul(a[4]).sub(a[3].mul(a[3]));
    let quad = a[1]
        .mul(a[1])
        .mul(a[4])
        .sub(Dd::from(2.0).mul(a[1]).mul(a[2]).mul(a[3]))
        .add(a[2].mul(a[2]).mul(a[2]));
    a[0].sub(quad.div(delta2)).to_f64()
}

/// `eta` through the Schur complement of the Hankel matrix:
/// `Delta_2 (a0 - [a1 a2] M^{-1} [a1 a2]^T)` with `M = [[a2,a3],[a3,a4]]`,
/// in double-double arithmetic. Verification route.
pub fn eta_oracle_schur(x: f64) -> f64 {
    if x.abs() < X_SWITCH {
        let s = small_x_series();
        return eval_series(&s.eta, x);
    }
    let a: Vec<Dd> = (0..=4).map(|j| a_dd(x, j)).collect();
    let delta2 = a[2].mul(a[4]).sub(a[3].mul(a[3]));
    // [a1 a2] [[a4, -a3], [-a3, a2]] [a1 a2]^T
    let quad = a[1]
        .mul(a[1])
        .mul(a[4])
        .sub(Dd::from(2.0).mul(a[1]).mul(a[2]).mul(a[3]))
        .add(a[2].mul(a[2]).mul(a[2]));
    delta2.mul(a[0].sub(quad.div(delta2))).to_f64()
}

// ---------------------------------------------------------------------------
// The intensity profile F
// ---------------------------------------------------------------------------

/// Scaled moments `h_j = a_j e^{-2x}`, stable for large positive `x`.
fn h_scaled(x: f64, j: u32) -> f64 {
    let em = (-2.0 * x).exp();
    match j {
        0 => (1.0 - em) / (2.0 * x),
        1 => ((2.0 * x - 1.0) + em) / (4.0 * x * x),
        2 => ((1.0 + 2.0 * x * (x - 1.0)) - em) / (4.0 * x.powi(3)),
        3 => ((4.0 * x.powi(3) - 6.0 * x * x + 6.0 * x - 3.0) + 3.0 * em) / (8.0 * x.powi(4)),
        4 => {
            ((2.0 * x.powi(4) - 4.0 * x.powi(3) + 6.0 * x * x - 6.0 * x + 3.0) - 3.0 * em)
                / (4.0 * x.powi(5))
        }
        _ => unreachable!(),
    }
}

/// `eta e^{-6x}` from the sinh form, stable for `x >= 25`.
fn eta_scaled(x: f64) -> f64 {
    let em = (-2.0 * x).exp();
    let one_minus = 1.0 - em;
    let inner = x.powi(3) * em * (1.0 + em) - 0.5 * x * x * (3.0 + x * x) * em * one_minus
        + one_minus.powi(3) / 8.0;
    inner / (16.0 * x.powi(9))
}

/// The limiting intensity profile
/// `F(x) = (1/2pi) (a4^5/eta) (1 + (1/D2)(a4^2 D1^2/eta + a4 a3^2))^{-3}`.
///
/// Finite and positive on the whole line; `~ e^{-2x}` on the right and
/// `~ x^{-16}` on the left.
pub fn intensity_f(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x > X_LOG_ROUTE {
        // Log-space route: a4^5 ~ e^{10x} overflows past x ~ 70.
        let h3 = h_scaled(x, 3);
        let h4 = h_scaled(x, 4);
        let d1 = h_scaled(x, 1) * h3 - h_scaled(x, 2).powi(2);
        let d2 = h_scaled(x, 2) * h4 - h3 * h3;
        let eta_h = eta_scaled(x);
        let q = (h4 * h4 * d1 * d1 / eta_h + h4 * h3 * h3) / d2;
        let ln_f = -(2.0 * PI).ln() - 2.0 * x + 5.0 * h4.ln()
            - eta_h.ln()
            - 3.0 * q.ln()
            - 3.0 * ((-2.0 * x).exp() / q).ln_1p();
        return ln_f.exp();
    }
    let a3 = a_j(x, 3).unwrap();
    let a4 = a_j(x, 4).unwrap();
    let (d1, d2, eta) = deltas_eta(x);
    let correction = (a4 * a4 * d1 * d1 / eta + a4 * a3 * a3) / d2;
    (1.0 / (2.0 * PI)) * a4.powi(5) / eta / (1.0 + correction).powi(3)
}

// ---------------------------------------------------------------------------
// c*(K), c*, lambda_{K,U}, survival
// ---------------------------------------------------------------------------

/// `c*(K) = (1/4) integral of F over [-K, K]`, absolute quadrature error
/// below 1e-10.
pub fn c_star_k(k: f64) -> Result<f64, Error> {
    if k.is_nan() || k < 0.0 {
        return Err(Error::InvalidArgument(format!("K = {k} must be >= 0")));
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    let (integral, _err) = quad::adaptive(&intensity_f, -k, k, 1e-12);
    Ok(integral / 4.0)
}

/// `c*` with a certified error bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CStar {
    pub value: f64,
    /// Tail remainder bound beyond `[-k_max, k_max]`, envelope constants
    /// fitted on [20,60] and [-60,-20] with a 10x safety factor.
    pub tail_bound: f64,
    pub quad_error: f64,
    pub k_max: f64,
}

/// `c* = (1/4) integral of F over R`, truncated at `k_max` with certified
/// exponential/polynomial tail envelopes.
pub fn c_star_with(k_max: f64) -> CStar {
    let (integral, quad_error) = quad::adaptive(&intensity_f, -k_max, k_max, 1e-12);
    // Right tail: F <= C_r e^{-x}; left tail: F <= C_l |x|^{-16}.
    let mut c_right = 0.0f64;
    let mut c_left = 0.0f64;
    let mut x: f64 = 20.0;
    while x <= 60.0 {
        c_right = c_right.max(x.exp() * intensity_f(x));
        c_left = c_left.max(x.powi(16) * intensity_f(-x));
        x += 0.5;
    }
    let tail_right = 10.0 * c_right * (-k_max).exp();
    let tail_left = 10.0 * c_left / (15.0 * k_max.powi(15));
    CStar {
        value: integral / 4.0,
        tail_bound: (tail_right + tail_left) / 4.0,
        quad_error: quad_error / 4.0,
        k_max,
    }
}

/// `c*` at the default truncation `K_max = 60`, where the certified tail
/// remainder is far below 1e-9.
pub fn c_star() -> CStar {
    c_star_with(60.0)
}

/// Cached `c*` value for hot paths.
pub fn c_star_cached() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| c_star().value)
}

/// `lambda_{K,U} = c*(K) integral of t^3 over U`.
pub fn lambda_k_u(k: f64, u: &IntervalSet) -> Result<f64, Error> {
    Ok(c_star_k(k)? * u.cubic_measure())
}

/// Limit law of the scaled minimal gap: `P[n^{5/4} m_n >= s] -> exp(-c* s^4/4)`.
pub fn min_gap_survival(s: f64) -> Result<f64, Error> {
    if s < 0.0 {
        return Err(Error::NegativeGap(s));
    }
    Ok((-c_star_cached() * s.powi(4) / 4.0).exp())
}

// ---------------------------------------------------------------------------
// Table output
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct IntensityRow {
    pub x: f64,
    pub a: [f64; 5],
    pub delta1: f64,
    pub delta2: f64,
    pub eta: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntensityTable {
    pub rows: Vec<IntensityRow>,
    pub c_star_k: Vec<(f64, f64)>,
    pub c_star: CStar,
}

/// Tabulates the intensity machinery on a uniform grid, with `c*(K)` for
/// the requested `K` values.
pub fn build_table(x_min: f64, x_max: f64, step: f64, ks: &[f64]) -> Result<IntensityTable, Error> {
    if step.is_nan() || step <= 0.0 || x_max < x_min {
        return Err(Error::InvalidArgument(format!(
            "bad grid {x_min}..{x_max} step {step}"
        )));
    }
    let count = ((x_max - x_min) / step).round() as usize + 1;
    let rows = (0..count)
        .map(|i| {
            let x = x_min + step * i as f64;
            let (delta1, delta2, eta) = deltas_eta(x);
            IntensityRow {
                x,
                a: [
                    a_j(x, 0).unwrap(),
                    a_j(x, 1).unwrap(),
                    a_j(x, 2).unwrap(),
                    a_j(x, 3).unwrap(),
                    a_j(x, 4).unwrap(),
                ],
                delta1,
                delta2,
                eta,
                f: intensity_f(x),
            }
        })
        .collect();
    let c_star_k = ks
        .iter()
        .map(|&k| c_star_k(k).map(|v| (k, v)))
        .collect::<Result<_, _>>()?;
    Ok(IntensityTable {
        rows,
        c_star_k,
        c_star: c_star(),
    })
}

impl IntensityTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,a0,a1,a2,a3,a4,delta1,delta2,eta,F\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.x, r.a[0], r.a[1], r.a[2], r.a[3], r.a[4], r.delta1, r.delta2, r.eta, r.f
            ));
        }
        out
    }
}
