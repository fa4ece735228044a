use thiserror::Error;

/// Errors raised across the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank {0}: need n >= 2")]
    InvalidRank(usize),
    #[error("rank {0} exceeds the supported maximum of {1} variables")]
    RankTooLarge(usize, usize),
    #[error("word is not a reduced expression for the longest element: {0}")]
    NotReduced(String),
    #[error("invalid root order: {0}")]
    InvalidOrder(String),
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("T is not in z+(l): {0}")]
    InvalidT(String),
    #[error("division by zero")]
    ZeroDivisor,
    #[error("evaluation point is a pole")]
    PoleAtPoint,
    #[error("element is not of weight zero")]
    NotWeightZero,
    #[error("truncation overflow: weight of height {height} exceeds depth {depth}")]
    TruncationOverflow { height: i64, depth: usize },
    #[error("copy decomposition failed at weight {0}: change of basis is singular")]
    DecompositionFailure(String),
    #[error("degenerate central element: denominator vanishes identically at {0}")]
    DegenerateCenter(String),
    #[error("Shapovalov form is degenerate at weight {0}")]
    DegenerateForm(String),
    #[error("subalgebra {0} is not standard")]
    NotStandard(String),
    #[error("unsupported root system type {0}: only type A is implemented")]
    UnsupportedType(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no usable evaluation point found after {0} attempts")]
    NoGenericPoint(usize),
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
