use thiserror::Error;

/// Every failure mode of the library. Variants carry enough context to be
/// reported on the command line without a backtrace.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("no continued-fraction convergent inside the error window")]
    NoConvergent,
    #[error("degenerate interpolation instance: {0}")]
    Degenerate(String),
    #[error("ill-conditioned node set: {0}")]
    IllConditioned(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("coset enumeration exceeded its budget of {0} representatives")]
    BudgetExceeded(usize),
    #[error("matrix is not in Gamma0({0})")]
    NotInGamma0(u64),
    #[error("reduction did not terminate after {0} steps")]
    NonTermination(usize),
    #[error("theta series would need a truncation radius of {0}")]
    SlowConvergence(usize),
    #[error("theta quotient denominator vanishes")]
    VanishingDenominator,
    #[error("Borchardt iteration stalled after {0} steps")]
    Stall(usize),
    #[error("branch of tau3 is ambiguous")]
    BranchAmbiguous,
    #[error("required theta quotient vanishes")]
    Vanishing,
    #[error("point lies on the product-of-elliptic-curves locus")]
    ProductOfElliptic,
    #[error("singular conversion: {0}")]
    Singular(String),
    #[error("continuation path lost: {0}")]
    PathFailure(String),
    #[error("target lies on the singular locus")]
    SingularTarget,
    #[error("Newton stagnated above tolerance: {0}")]
    Precision(String),
    #[error("fast path rejected")]
    Reject,
    #[error("denominator normalisation coefficient vanishes")]
    NormalizationZero,
    #[error("degree probes disagree: {0}")]
    Unstable(String),
    #[error("evaluation point too close to the denominator locus")]
    NearDenominator,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
