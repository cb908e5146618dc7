use thiserror::Error;

/// Errors surfaced by the library. Domain errors (bad input, chart domain)
/// are recoverable; internal invariant violations panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("label {0} out of range")]
    LabelOutOfRange(usize),

    #[error("repeated label {0} in tuple")]
    RepeatedLabel(usize),

    #[error("n-gon needs at least 3 entries, got {0}")]
    TooFewEntries(usize),

    #[error("points must be pairwise distinct")]
    CoincidentPoints,

    #[error("n-gon has fewer than three distinct entries")]
    TooFewDistinctEntries,

    #[error("string is not normalized (component {0:?} violates the 0,1,inf convention)")]
    NotNormalized([usize; 3]),

    #[error("string does not satisfy the cross-ratio equations")]
    NotInY,

    #[error("string is not extremal")]
    NotExtremal,

    #[error("string lies outside the chart neighborhood")]
    OutsideNeighborhood,

    #[error("chart values must be finite and nonzero, got {0}")]
    ChartValueSpecial(String),

    #[error("expected {expected} chart values, got {got}")]
    ChartArity { expected: usize, got: usize },

    #[error("values lie outside the chart image: {0}")]
    ChartDomain(String),

    #[error("not a valid tree: {0}")]
    InvalidTree(String),

    #[error("covering violates axiom ({0})")]
    NotArboral(String),

    #[error("invalid tree edit: {0}")]
    InvalidEdit(String),

    #[error("exhaustive enumeration capped at n = {cap}, requested n = {n}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("invalid stable curve: {0}")]
    InvalidCurve(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
