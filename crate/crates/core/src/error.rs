use thiserror::Error;

use crate::polydyn::ProjPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("valuation of zero is infinite")]
    InfiniteValuation,
    #[error("logarithm of zero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid quadratic field parameter d = {0}")]
    InvalidField(i64),
    #[error("field mismatch: Q(sqrt {expected}) vs Q(sqrt {found})")]
    FieldMismatch { expected: i64, found: i64 },
    #[error("place {place} does not extend to the coefficient field")]
    PlaceMismatch { place: String },
    #[error("split-place precision escalation exceeded {cap} p-adic digits")]
    PrecisionCap { cap: u32 },
    #[error("all-zero coordinate tuple")]
    ZeroTuple,
    #[error("polynomial shape mismatch: {0}")]
    Shape(String),
    #[error("indeterminate point at step {step}: {point}")]
    Indeterminate { step: usize, point: String },
    #[error("point {0} lies in the support of the divisor")]
    SupportHit(ProjPoint),
    #[error("divisor is defined over a quadratic field; use galois_symmetrized")]
    NeedsSymmetrization,
    #[error("symbolic composition depth {requested} exceeds cap {cap}")]
    CompositionCap { requested: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("orbit too short: need at least {needed} usable steps, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("cache record rejected: {0}")]
    CorruptCache(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
