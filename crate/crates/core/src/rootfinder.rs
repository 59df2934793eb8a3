//! Simultaneous root finding: Aberth-Ehrlich iteration with an
//! eigenvalue-based oracle for small degrees.

use crate::dd::{eval_poly_dd, DdComplex};
use crate::polyeval::eval_derivatives_coeffs;
use crate::sampling::PolynomialSample;
use crate::{Error, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SolverOptions {
    /// Scaled residual bound required for `converged = true`.
    pub residual_tol: f64,
    pub max_iters: u32,
    /// Double-double Newton polish for root pairs closer than `10 n^{-5/4}`.
    pub polish: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            residual_tol: 1e-10,
            max_iters: 200,
            polish: true,
        }
    }
}

/// All roots of one polynomial, with per-root scaled residuals.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<C64>,
    /// `|f(root)| / (max_k |xi_k| * max(1, |root|)^n)` per root.
    pub residuals: Vec<f64>,
    pub iterations: u32,
    pub converged: bool,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Drops zero leading coefficients (keeping the algebraic degree) and counts
/// exact roots at the origin from zero trailing coefficients.
fn trim(coeffs: &[f64]) -> Result<(&[f64], usize), Error> {
    let top = coeffs
        .iter()
        .rposition(|&c| c != 0.0)
        .ok_or(Error::ZeroPolynomial)?;
    let bottom = coeffs.iter().position(|&c| c != 0.0).unwrap();
    Ok((&coeffs[bottom..=top], bottom))
}

/// Scaled residual `|f(root)| / (max_k |xi_k| max(1,|root|)^n)`. For roots
/// outside the unit circle both `f` and the scale overflow, so the quotient
/// is computed through the reversed polynomial: `f(z) = z^n g(1/z)`.
fn scaled_residual(coeffs: &[f64], rev_coeffs: &[f64], root: C64) -> f64 {
    let coeff_max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if root.norm() <= 1.0 {
        eval_derivatives_coeffs(coeffs, root).f.norm() / coeff_max
    } else {
        eval_derivatives_coeffs(rev_coeffs, 1.0 / root).f.norm() / coeff_max
    }
}

/// `f(z)/f'(z)`, evaluated through the reversed polynomial when `|z| > 1`
/// so intermediate values never overflow: with `w = 1/z` and `g` of degree
/// `m`, `f/f' = z g(w) / (m g(w) - w g'(w))`.
fn newton_ratio(coeffs: &[f64], rev_coeffs: &[f64], z: C64) -> C64 {
    if z.norm() <= 1.0 {
        let b = eval_derivatives_coeffs(coeffs, z);
        if b.f1.norm() > 0.0 {
            b.f / b.f1
        } else {
            C64::new(1e-6, 1e-6)
        }
    } else {
        let m = (coeffs.len() - 1) as f64;
        let w = 1.0 / z;
        let b = eval_derivatives_coeffs(rev_coeffs, w);
        let denom = m * b.f - w * b.f1;
        if denom.norm() > 0.0 {
            z * b.f / denom
        } else {
            C64::new(1e-6, 1e-6)
        }
    }
}

/// Aberth-Ehrlich initial guesses: rings of radius `1 +- j/(2m)` near the
/// unit circle, where the roots of Kac polynomials cluster, with a fixed
/// angular offset so the guesses avoid the real axis.
fn initial_guesses(m: usize) -> Vec<C64> {
    let mut guesses = Vec::with_capacity(m);
    let rings = [-2.0, -1.0, 1.0, 2.0];
    for i in 0..m {
        let ring = rings[i % rings.len()];
        let r = 1.0 + ring / (2.0 * m as f64);
        let theta = 2.0 * std::f64::consts::PI * (i as f64) / (m as f64) + 0.35;
        guesses.push(C64::from_polar(r, theta));
    }
    guesses
}

/// Finds the roots of the effective-degree part of `poly` by simultaneous
/// Aberth-Ehrlich iteration. Roots at the origin are deflated exactly.
/// Returns one root per unit of algebraic degree.
pub fn find_roots(poly: &PolynomialSample, opts: SolverOptions) -> Result<RootSet, Error> {
    let (coeffs, origin_mult) = trim(&poly.coeffs)?;
    let m = coeffs.len() - 1;
    let mut roots = vec![C64::new(0.0, 0.0); origin_mult];

    if m == 0 {
        let residuals = vec![0.0; origin_mult];
        return Ok(RootSet {
            roots,
            residuals,
            iterations: 0,
            converged: true,
        });
    }

    let rev_coeffs: Vec<f64> = coeffs.iter().rev().copied().collect();
    let mut z = initial_guesses(m);
    let mut newton = vec![C64::new(0.0, 0.0); m];
    let mut iterations = 0;
    let mut stable_iters = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let mut max_step = 0.0f64;
        for (zi, ni) in z.iter().zip(newton.iter_mut()) {
            *ni = newton_ratio(coeffs, &rev_coeffs, *zi);
        }
        for i in 0..m {
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..m {
                if j != i {
                    repulsion += 1.0 / (z[i] - z[j]);
                }
            }
            let denom = 1.0 - newton[i] * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton[i] / denom
            } else {
                newton[i]
            };
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-14 {
            stable_iters += 1;
            if stable_iters >= 2 {
                break;
            }
        } else {
            stable_iters = 0;
        }
    }

    if opts.polish && m >= 2 {
        polish_close_pairs(coeffs, &mut z, poly.n);
    }

    roots.extend_from_slice(&z);
    let full_rev: Vec<f64> = poly.coeffs.iter().rev().copied().collect();
    let residuals: Vec<f64> = roots
        .iter()
        .map(|&r| scaled_residual(&poly.coeffs, &full_rev, r))
        .collect();
    let converged = residuals.iter().all(|&r| r <= opts.residual_tol);
    Ok(RootSet {
        roots,
        residuals,
        iterations,
        converged,
    })
}

/// Double-double Newton polish of root pairs closer than `10 n^{-5/4}`.
/// Gap statistics live exactly where f64 root error competes with the gap
/// size, so close pairs get the extra digits.
fn polish_close_pairs(coeffs: &[f64], roots: &mut [C64], n: u32) {
    let cutoff = 10.0 * (n as f64).powf(-1.25);
    let m = roots.len();
    let mut needs_polish = vec![false; m];
    for i in 0..m {
        for j in (i + 1)..m {
            if (roots[i] - roots[j]).norm() < cutoff {
                needs_polish[i] = true;
                needs_polish[j] = true;
            }
        }
    }
    for (root, polish) in roots.iter_mut().zip(needs_polish) {
        // Polishing evaluates the direct Horner form, which overflows far
        // outside the unit circle; the gap statistics live near it anyway.
        if !polish || root.norm() > 1.25 {
            continue;
        }
        let mut zd = DdComplex::from_f64(root.re, root.im);
        for _ in 0..4 {
            let (f, f1) = eval_poly_dd(coeffs, zd);
            let f1_norm = f1.to_c64().norm();
            if f1_norm == 0.0 {
                break;
            }
            zd = zd.sub(f.div(f1));
        }
        let candidate = zd.to_c64();
        if (candidate - *root).norm() < cutoff {
            *root = candidate;
        }
    }
}

/// Eigenvalues of the Frobenius companion matrix of a polynomial with
/// nonzero constant and leading coefficients. Even polynomials
/// `p(z) = q(z^2)` are deflated first: their +- paired spectra can make
/// the unshifted QR sweep cycle indefinitely.
fn companion_eigenvalues(coeffs: &[f64]) -> Result<Vec<C64>, Error> {
    let m = coeffs.len() - 1;
    let m_even = coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0);
    if m_even {
        // p(z) = q(z^2): solve the half-degree polynomial and split roots.
        let half: Vec<f64> = coeffs.iter().step_by(2).copied().collect();
        let inner = companion_eigenvalues(&half)?;
        let mut out = Vec::with_capacity(m);
        for w in inner {
            let r = w.sqrt();
            out.push(r);
            out.push(-r);
        }
        return Ok(out);
    }
    let lead = coeffs[m];
    let mut companion = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        companion[(k, m - 1)] = -coeffs[k] / lead;
        if k + 1 < m {
            companion[(k + 1, k)] = 1.0;
        }
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 200 * m.max(10)).ok_or(
        Error::InvalidArgument("companion eigenvalue iteration did not converge".into()),
    )?;
    Ok(schur.complex_eigenvalues().iter().cloned().collect())
}

/// Roots via eigenvalues of the Frobenius companion matrix; the
/// cross-validation oracle for `find_roots`, limited to degree 64.
pub fn companion_roots(poly: &PolynomialSample) -> Result<RootSet, Error> {
    if poly.n < 2 {
        return Err(Error::DegreeTooSmall {
            min: 2,
            got: poly.n,
        });
    }
    if poly.n > 64 {
        return Err(Error::CompanionDegree(poly.n));
    }
    let (coeffs, origin_mult) = trim(&poly.coeffs)?;
    let m = coeffs.len() - 1;
    let mut roots = vec![C64::new(0.0, 0.0); origin_mult];
    if m > 0 {
        let mut eigen = companion_eigenvalues(coeffs)?;
        // Same close-pair refinement as the simultaneous solver: repeated
        // roots come out of the eigensolver with sqrt(eps) fuzz, beyond
        // the 1e-8 cross-matching contract.
        polish_close_pairs(coeffs, &mut eigen, poly.n);
        roots.extend(eigen);
    }
    let full_rev: Vec<f64> = poly.coeffs.iter().rev().copied().collect();
    let residuals: Vec<f64> = roots
        .iter()
        .map(|&r| scaled_residual(&poly.coeffs, &full_rev, r))
        .collect();
    Ok(RootSet {
        roots,
        residuals,
        iterations: 0,
        converged: true,
    })
}

/// Greedy nearest matching between two root multisets: repeatedly pair the
/// globally closest remaining roots. Returns the largest matched distance.
pub fn greedy_match_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let m = a.len();
    let mut used_a = vec![false; m];
    let mut used_b = vec![false; m];
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(m * m);
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            pairs.push(((ai - bj).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut matched = 0;
    let mut max_distance = 0.0f64;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            max_distance = max_distance.max(d);
            matched += 1;
            if matched == m {
                break;
            }
        }
    }
    max_distance
}

/// Validation summary for a computed root set.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub max_residual: f64,
    /// Relative error of `sum(roots) = -xi_{n-1}/xi_n`, or None when the
    /// condition proxy `max|xi_k|/|xi_n| > 1e3` downgrades Vieta to advisory.
    pub vieta_sum_error: Option<f64>,
    /// Relative error of `prod(roots) = (-1)^n xi_0/xi_n`, same gating.
    pub vieta_product_error: Option<f64>,
    /// Advisory copies of the Vieta errors, always populated.
    pub vieta_sum_advisory: f64,
    pub vieta_product_advisory: f64,
    /// Largest distance when matching the root set against its conjugates.
    pub conjugation_defect: f64,
    /// Roots outside the annulus `1 +- log(n)/n`.
    pub outside_annulus: usize,
}

/// Checks residuals, Vieta identities, conjugation closure and annulus
/// membership counts for a root set. Residuals are recomputed from the
/// roots given, so externally perturbed roots are caught.
pub fn validate_roots(poly: &PolynomialSample, rs: &RootSet) -> ValidationReport {
    let (coeffs, _) = trim(&poly.coeffs).expect("validated polynomial is nonzero");
    let m = coeffs.len() - 1;
    let lead = coeffs[m];
    let coeff_max = coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let well_conditioned = coeff_max / lead.abs() <= 1e3;

    // Vieta: compare against the coefficient ratios of the trimmed polynomial.
    let sum: C64 = rs.roots.iter().sum();
    let sum_target = if m >= 1 {
        -C64::new(coeffs[m - 1] / lead, 0.0)
    } else {
        C64::new(0.0, 0.0)
    };
    let vieta_sum = (sum - sum_target).norm() / sum_target.norm().max(1.0);

    // Product in log magnitude + renormalized phase, to survive n ~ 1000.
    // Exact origin roots from deflation are excluded; the remaining
    // product compares against the trimmed coefficient ratio.
    let mut log_mag = 0.0f64;
    let mut phase = C64::new(1.0, 0.0);
    let mut nonzero = 0usize;
    for &r in &rs.roots {
        let norm = r.norm();
        if norm == 0.0 {
            continue;
        }
        nonzero += 1;
        log_mag += norm.ln();
        phase *= r / norm;
    }
    let prod_target = {
        let t = coeffs[0] / lead;
        if nonzero.is_multiple_of(2) {
            t
        } else {
            -t
        }
    };
    let vieta_product = if prod_target == 0.0 {
        1.0
    } else {
        let target_log = prod_target.abs().ln();
        let target_phase = if prod_target > 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        let mag_rel = (log_mag - target_log).abs();
        let phase_err = (phase - target_phase).norm();
        // For small errors |P/T - 1| ~ |log|P| - log|T|| + phase defect.
        mag_rel + phase_err
    };

    let conj: Vec<C64> = rs.roots.iter().map(|r| r.conj()).collect();
    let conjugation_defect = greedy_match_distance(&rs.roots, &conj);

    let full_rev: Vec<f64> = poly.coeffs.iter().rev().copied().collect();
    let max_residual = rs
        .roots
        .iter()
        .map(|&r| scaled_residual(&poly.coeffs, &full_rev, r))
        .fold(0.0f64, f64::max);

    let n = poly.n as f64;
    let band = n.ln() / n;
    let outside_annulus = rs
        .roots
        .iter()
        .filter(|r| {
            let m = r.norm();
            m < 1.0 - band || m > 1.0 + band
        })
        .count();

    ValidationReport {
        max_residual,
        vieta_sum_error: well_conditioned.then_some(vieta_sum),
        vieta_product_error: well_conditioned.then_some(vieta_product),
        vieta_sum_advisory: vieta_sum,
        vieta_product_advisory: vieta_product,
        conjugation_defect,
        outside_annulus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{make_law, sample_polynomial, LawKind};

    fn poly_from(coeffs: Vec<f64>) -> PolynomialSample {
        let n = (coeffs.len() - 1) as u32;
        PolynomialSample {
            n,
            law: make_law(LawKind::Gaussian, None).unwrap(),
            seed: 0,
            coeffs,
        }
    }

    fn sorted_by_arg(mut roots: Vec<C64>) -> Vec<C64> {
        roots.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        roots
    }

    #[test]
    fn quartic_roots_of_unity() {
        let p = poly_from(vec![-1.0, 0.0, 0.0, 0.0, 1.0]);
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        assert!(rs.converged);
        let expected = [
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(1.0, 0.0),
        ];
        let got = sorted_by_arg(rs.roots.clone());
        let want = sorted_by_arg(expected.to_vec());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn constructed_quadratic() {
        // (z - 1)(z - 1.1) = z^2 - 2.1 z + 1.1
        let p = poly_from(vec![1.1, -2.1, 1.0]);
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        let mut roots = rs.roots.clone();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - C64::new(1.1, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn companion_quadratic_and_triple_root() {
        let p = poly_from(vec![1.1, -2.1, 1.0]);
        let rs = companion_roots(&p).unwrap();
        let mut roots = rs.roots.clone();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - C64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((roots[1] - C64::new(1.1, 0.0)).norm() < 1e-9);

        // z^3: triple root at the origin, deflated exactly.
        let p = poly_from(vec![0.0, 0.0, 0.0, 1.0]);
        let rs = companion_roots(&p).unwrap();
        assert_eq!(rs.roots, vec![C64::new(0.0, 0.0); 3]);
    }

    #[test]
    fn companion_degree_limit() {
        let law = make_law(LawKind::Gaussian, None).unwrap();
        let p = sample_polynomial(law, 65, 1).unwrap();
        assert!(matches!(
            companion_roots(&p),
            Err(Error::CompanionDegree(65))
        ));
    }

    #[test]
    fn aberth_matches_companion_on_gaussian_sample() {
        let law = make_law(LawKind::Gaussian, None).unwrap();
        let p = sample_polynomial(law, 30, 77).unwrap();
        let a = find_roots(&p, SolverOptions::default()).unwrap();
        assert!(a.converged);
        let c = companion_roots(&p).unwrap();
        assert!(greedy_match_distance(&a.roots, &c.roots) <= 1e-8);
    }

    #[test]
    fn aberth_matches_companion_on_rademacher_sample() {
        let law = make_law(LawKind::Rademacher, None).unwrap();
        let p = sample_polynomial(law, 20, 5).unwrap();
        let a = find_roots(&p, SolverOptions::default()).unwrap();
        let c = companion_roots(&p).unwrap();
        assert!(greedy_match_distance(&a.roots, &c.roots) <= 1e-8);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        let p = poly_from(vec![0.0, 0.0, 0.0]);
        assert!(matches!(
            find_roots(&p, SolverOptions::default()),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn degree_preserved_with_leading_zeros() {
        // uniform3-style sample whose top coefficient vanished: the root
        // count matches the algebraic degree.
        let p = poly_from(vec![1.0, -1.0, 1.0, 0.0]);
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        assert_eq!(rs.roots.len(), 2);
    }

    #[test]
    fn validation_flags_a_perturbed_root() {
        let p = poly_from(vec![-1.0, 0.0, 0.0, 0.0, 1.0]);
        let mut rs = find_roots(&p, SolverOptions::default()).unwrap();
        let report = validate_roots(&p, &rs);
        assert!(report.max_residual < 1e-12);
        assert!(report.vieta_sum_error.unwrap() < 1e-12);
        assert!(report.conjugation_defect < 1e-12);

        // Perturb the root at 1 by 1e-3: |f'(1)| = 4 turns that into a
        // residual of about 4e-3 (the coefficient scale here is 1).
        for r in rs.roots.iter_mut() {
            if (*r - C64::new(1.0, 0.0)).norm() < 1e-6 {
                *r += C64::new(1e-3, 0.0);
            }
        }
        let report = validate_roots(&p, &rs);
        assert!(
            (report.max_residual - 4e-3).abs() < 4e-4,
            "residual {}",
            report.max_residual
        );
    }

    #[test]
    fn vieta_on_large_gaussian_sample() {
        // Accumulated-rounding oracle: measured sum error at n = 500 sits
        // around 1e-9; the bound below is the spec's 1e-6.
        let law = make_law(LawKind::Gaussian, None).unwrap();
        let p = sample_polynomial(law, 500, 31).unwrap();
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        assert!(rs.converged, "max residual {}", rs.max_residual());
        let report = validate_roots(&p, &rs);
        if let Some(err) = report.vieta_sum_error {
            assert!(err <= 1e-6, "vieta sum error {err}");
        }
    }

    #[test]
    fn conjugation_closure_under_permutation() {
        let law = make_law(LawKind::Rademacher, None).unwrap();
        let p = sample_polynomial(law, 60, 3).unwrap();
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        let report = validate_roots(&p, &rs);
        assert!(report.conjugation_defect <= 10.0 * 1e-10 * 10.0);
    }

    #[test]
    fn validation_is_permutation_invariant() {
        let p = poly_from(vec![1.1, -2.1, 1.0]);
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        let mut swapped = rs.clone();
        swapped.roots.reverse();
        swapped.residuals.reverse();
        let a = validate_roots(&p, &rs);
        let b = validate_roots(&p, &swapped);
        assert_eq!(a.vieta_sum_advisory, b.vieta_sum_advisory);
        assert_eq!(a.conjugation_defect, b.conjugation_defect);
    }

    #[test]
    fn close_pair_polish_improves_the_gap() {
        // (z - 1)(z - 1 - h) * (z^4 - 16) with h at the n^{-5/4} scale:
        // the polished gap matches h to 1e-4 relative.
        let h = 1e-4;
        // (z-1)(z-1-h) = z^2 - (2+h) z + (1+h)
        let quad = [1.0 + h, -(2.0 + h), 1.0];
        let quartic = [-16.0, 0.0, 0.0, 0.0, 1.0];
        // multiply out
        let mut coeffs = vec![0.0; 7];
        for (i, &a) in quad.iter().enumerate() {
            for (j, &b) in quartic.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let p = poly_from(coeffs);
        let rs = find_roots(&p, SolverOptions::default()).unwrap();
        let mut min_gap = f64::INFINITY;
        for i in 0..rs.roots.len() {
            for j in (i + 1)..rs.roots.len() {
                min_gap = min_gap.min((rs.roots[i] - rs.roots[j]).norm());
            }
        }
        assert!((min_gap - h).abs() < 1e-4 * h, "gap {min_gap:e} vs {h:e}");
    }
}
