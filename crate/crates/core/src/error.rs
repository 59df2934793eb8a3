use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown coefficient law `{0}`")]
    UnknownLaw(String),
    #[error("invalid law parameter: {0}")]
    InvalidLawParam(String),
    #[error("degree must be at least {min}, got {got}")]
    DegreeTooSmall { min: u32, got: u32 },
    #[error("all coefficients are zero; no polynomial to solve")]
    ZeroPolynomial,
    #[error("companion-matrix oracle only supports degrees 2..=64, got {0}")]
    CompanionDegree(u32),
    #[error("malformed interval set: {0}")]
    MalformedIntervals(String),
    #[error("interval set must be bounded")]
    UnboundedIntervals,
    #[error("derivative index out of range: {0}")]
    DerivativeIndex(u32),
    #[error("prediction is degenerate: {0}")]
    DegeneratePrediction(&'static str),
    #[error(
        "net of {points} points exceeds the cap of {cap}; raise the cap or lower K, n or beta"
    )]
    NetTooLarge { points: u64, cap: u64 },
    #[error("duplicate points in tuple")]
    DuplicatePoints,
    #[error("nonpositive variance: {0}")]
    NonpositiveVariance(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("survival function is only defined for s >= 0, got {0}")]
    NegativeGap(f64),
    #[error("records mix different degrees: {0} and {1}")]
    MixedDegrees(u32, u32),
    #[error("too few hits for a slope estimate: {hits} radii of {total} had none")]
    TooFewHits { hits: usize, total: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
