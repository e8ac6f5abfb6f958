use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("ring axiom violated: {0}")]
    AxiomViolation(String),

    #[error("operands belong to different rings")]
    MixedRings,

    #[error("coordinate out of range: {0}")]
    CoordinateOutOfRange(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ring {0} has no trace pairing; only generic frequencies are available")]
    NotTraceAdmissible(String),

    #[error("{what} needs {required} units of work, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u64,
    },

    #[error("not an ideal: {0}")]
    NotAnIdeal(String),

    #[error("invalid variety: {0}")]
    InvalidVariety(String),

    #[error("empty variety")]
    EmptyVariety,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),
}
