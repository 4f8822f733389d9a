use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NshError {
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("nonpositive box length {0}")]
    NonPositiveLength(f64),
    #[error("stretch factor must be positive and finite, got {0}")]
    InvalidStretch(f64),
    #[error("generator matrix is singular (|det| = {0:e})")]
    SingularGenerators(f64),
    #[error("malformed generator matrix: {0}")]
    MalformedGenerators(String),
    #[error("collocation grid too small on axis {axis}: {points} points for bandwidth {bandwidth} (need at least {required})")]
    GridTooSmall {
        axis: usize,
        points: usize,
        bandwidth: usize,
        required: usize,
    },
    #[error("bandwidth must be at least 1 on every axis")]
    ZeroBandwidth,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite coefficient at slot {0}")]
    NonFinite(usize),
    #[error("fields live on different bases")]
    BasisMismatch,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("zero field has no fibration")]
    ZeroField,
    #[error("no constant solutions: β = {beta} ≤ 2√(1−α) = {threshold}")]
    NoConstantSolutions { beta: f64, threshold: f64 },
    #[error("fibration is not non-monotonous ({0})")]
    NotNonMonotonous(&'static str),
    #[error("all {starts} starts have monotonous fibrations; the ridge appears empty")]
    EmptyManifold { starts: usize },
    #[error("field is not in the rear-slope set: {0}")]
    NotInRearSlope(String),
    #[error("plateau radius {radius} does not fit in the domain")]
    BumpTooLarge { radius: f64 },
    #[error("unsupported integral power {0} (expected 2, 3 or 4)")]
    UnsupportedPower(u32),
    #[error("reflection extension applies to Neumann boxes only")]
    NotABox,
    #[error("operation requires a torus field")]
    NotATorus,
    #[error("replication counts must be >= 1 per axis")]
    InvalidCounts,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("exact arithmetic: {0}")]
    Exact(String),
}

pub type Result<T> = std::result::Result<T, NshError>;
