use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("step law is not standardized (mean {mean:e}, variance {variance:e}); pass standardize to rescale")]
    NonStandardized { mean: f64, variance: f64 },

    #[error("atom probabilities sum to {0:e}; expected 1 within 1e-12")]
    InvalidMass(f64),

    #[error("atom probability {0:e} is not positive")]
    NegativeProb(f64),

    #[error("alpha_u requires an integer power, got u = {0}")]
    NonIntegerPowerForAlpha(f64),

    #[error("retained key range {needed} exceeds the cap of {cap} keys")]
    SizeOverflow { needed: u64, cap: u64 },

    #[error("{point} is not a point of the lattice L_{n}")]
    OffLattice { point: String, n: u32 },

    #[error("x = {x} and n = {n} have different parities")]
    ParityMismatch { n: u64, x: i64 },

    #[error("argument {0} must be nonnegative")]
    NegativeArgument(f64),

    #[error("ballot counts require p >= q >= 0, got p = {p}, q = {q}")]
    InvalidCounts { p: u32, q: u32 },

    #[error("w = u + v - n = {0} is negative; the main term is undefined there")]
    NegativeW(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no simulated walk satisfied the conditioning event")]
    NoAcceptedSamples,

    #[error("{censored} of {trials} first-crossing walks hit the step cap (more than 0.1%)")]
    ExcessCensoring { censored: u64, trials: u64 },

    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
