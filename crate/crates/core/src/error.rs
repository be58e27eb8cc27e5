use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed literal `{literal}`: {reason}")]
    Parse { literal: String, reason: String },
    #[error("arguments must be pairwise distinct")]
    NotDistinct,
    #[error("tuple lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("end {end} does not lie in cone {cone}")]
    NotInCone { cone: String, end: String },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("need at least 3 parts, got {0}")]
    TooFewParts(usize),
    #[error("partial map does not preserve shape")]
    ShapeMismatch,
    #[error("point {0} already lies in the domain")]
    AlreadyInDomain(String),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("set is not expressible over the given parameters: {0}")]
    NotParameterShaped(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("ball would have {projected} vertices, cap is {cap}")]
    SizeCap { projected: u128, cap: u128 },
    #[error("radius {radius} is too small, need at least {needed}")]
    RadiusTooSmall { radius: u32, needed: u32 },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(literal: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        literal: literal.to_string(),
        reason: reason.into(),
    }
}
