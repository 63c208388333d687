use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element has valuation {valuation:?}, expected a unit")]
    NotAUnit { valuation: Option<i64> },
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("phase {0} does not have a prime-power denominator")]
    BadPhase(String),
    #[error("conductor {p}^{exp} exceeds the float embedding limit")]
    ConductorTooLarge { p: u32, exp: u32 },
    #[error("operation undefined on the zero function")]
    ZeroFunction,
    #[error("dilation parameter must be nonzero")]
    ZeroDilation,
    #[error("admissibility integral diverges: the function has nonzero integral")]
    Divergent,
    #[error("function is not in S_0 (nonzero integral)")]
    NotS0,
    #[error("window too small: nonzero coefficient at {0}")]
    WindowTooSmall(String),
    #[error("frame is not tight: ratios {0:?}")]
    NotTight(Vec<String>),
    #[error("kernel window is not closed under the dependency set of the coefficients")]
    WindowNotClosed,
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
