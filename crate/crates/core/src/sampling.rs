//! Coefficient laws and reproducible sampling of random polynomials.

use crate::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// The supported mean-zero, sub-Gaussian coefficient laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LawKind {
    /// Standard normal.
    Gaussian,
    /// Uniform on `{-1, +1}` (random Littlewood polynomial).
    Rademacher,
    /// Uniform on `{-1, 0, 1}`; carries an atom at zero.
    Uniform3,
    /// Uniform on `[-h, h]`; defaults to `h = sqrt(3)` so the variance is 1.
    UniformContinuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientLaw {
    pub kind: LawKind,
    /// Half-width for [`LawKind::UniformContinuous`]; unused otherwise.
    pub half_width: f64,
    /// True when `P[xi = 0] > 0`, violating the standing assumption of the
    /// Poisson limit; only `uniform3` sets it.
    pub atom_at_zero: bool,
}

impl CoefficientLaw {
    pub fn variance(&self) -> f64 {
        match self.kind {
            LawKind::Gaussian | LawKind::Rademacher => 1.0,
            LawKind::Uniform3 => 2.0 / 3.0,
            LawKind::UniformContinuous => self.half_width * self.half_width / 3.0,
        }
    }

    /// Spec string: `gaussian`, `rademacher`, `uniform3` or `uniform:<half-width>`.
    pub fn tag(&self) -> String {
        match self.kind {
            LawKind::Gaussian => "gaussian".to_string(),
            LawKind::Rademacher => "rademacher".to_string(),
            LawKind::Uniform3 => "uniform3".to_string(),
            LawKind::UniformContinuous => format!("uniform:{}", self.half_width),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.kind {
            LawKind::Gaussian => StandardNormal.sample(rng),
            LawKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            LawKind::Uniform3 => (rng.random_range(0..3u32) as f64) - 1.0,
            LawKind::UniformContinuous => rng.random_range(-self.half_width..=self.half_width),
        }
    }
}

/// Validates a law descriptor. `params` is the optional half-width for the
/// continuous uniform law; it defaults to `sqrt(3)` (unit variance).
pub fn make_law(kind: LawKind, half_width: Option<f64>) -> Result<CoefficientLaw, Error> {
    let half_width = match kind {
        LawKind::UniformContinuous => {
            let h = half_width.unwrap_or(3.0_f64.sqrt());
            if h.is_nan() || h <= 0.0 || !h.is_finite() {
                return Err(Error::InvalidLawParam(format!("half-width {h}")));
            }
            h
        }
        _ => {
            if half_width.is_some() {
                return Err(Error::InvalidLawParam(format!(
                    "{kind:?} takes no parameters"
                )));
            }
            0.0
        }
    };
    Ok(CoefficientLaw {
        kind,
        half_width,
        atom_at_zero: kind == LawKind::Uniform3,
    })
}

/// Parses the CLI form `gaussian | rademacher | uniform3 | uniform:<half-width>`.
pub fn parse_law(text: &str) -> Result<CoefficientLaw, Error> {
    match text.trim() {
        "gaussian" => make_law(LawKind::Gaussian, None),
        "rademacher" => make_law(LawKind::Rademacher, None),
        "uniform3" => make_law(LawKind::Uniform3, None),
        other => {
            if let Some(h) = other.strip_prefix("uniform:") {
                let h: f64 = h
                    .parse()
                    .map_err(|_| Error::InvalidLawParam(h.to_string()))?;
                make_law(LawKind::UniformContinuous, Some(h))
            } else if other == "uniform" {
                make_law(LawKind::UniformContinuous, None)
            } else {
                Err(Error::UnknownLaw(other.to_string()))
            }
        }
    }
}

/// One sampled polynomial `f_n(z) = sum_{k=0}^n coeffs[k] z^k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialSample {
    pub n: u32,
    pub law: CoefficientLaw,
    pub seed: u64,
    pub coeffs: Vec<f64>,
}

impl PolynomialSample {
    /// Index of the highest nonzero coefficient: the algebraic degree.
    /// Differs from `n` only for laws with an atom at zero.
    pub fn effective_degree(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .map(|k| k as u32)
    }
}

/// SplitMix64 step; the standard finalizer used for seed derivation.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives the stream seed for a given trial from a master seed by counter
/// mixing, so the set of streams does not depend on execution order.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut state = master ^ trial.wrapping_mul(0xa0761d6478bd642f);
    let a = splitmix64(&mut state);
    let b = splitmix64(&mut state);
    a ^ b.rotate_left(17)
}

/// Samples the `n + 1` coefficients of `f_n` from `law`, deterministically in
/// `(law, n, seed)`. Zero leading coefficients are kept as drawn; degree
/// bookkeeping lives in [`PolynomialSample::effective_degree`].
pub fn sample_polynomial(
    law: CoefficientLaw,
    n: u32,
    seed: u64,
) -> Result<PolynomialSample, Error> {
    if n < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..=n).map(|_| law.draw(&mut rng)).collect();
    Ok(PolynomialSample {
        n,
        law,
        seed,
        coeffs,
    })
}
