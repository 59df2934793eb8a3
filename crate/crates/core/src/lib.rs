//! Statistics of close roots of random Kac polynomials at desk scale.
//!
//! The crate samples polynomials `f_n(z) = sum xi_k z^k` with i.i.d.
//! coefficients, finds all complex roots, and turns them into the gap
//! observables whose limit is a non-homogeneous Poisson process with
//! intensity `c* t^3` at scale `n^{-5/4}`. The `intensity` module carries
//! the closed-form intensity profile and its constants, `net` the annulus
//! discretization and local root-prediction events, and `gaussian` the
//! exact Gaussian reference computations used to cross-check both.

pub mod dd;
pub mod error;
pub mod gaps;
pub mod gaussian;
pub mod intensity;
pub mod intervals;
pub mod net;
pub mod polyeval;
pub mod quad;
pub mod rootfinder;
pub mod sampling;
pub mod stats;

pub use error::Error;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

/// The `n^{5/4}` scale factor applied to root distances.
pub fn gap_scale(n: u32) -> f64 {
    (n as f64).powf(1.25)
}
