use thiserror::Error;

/// Errors raised by preconditions of library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApxError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operation needs at least one input")]
    ZeroInputs,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("expected a single-output circuit, found {0} outputs")]
    NotSingleOutput(usize),
    #[error("enumeration over {needed} bits exceeds the cap of {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("insufficient advantage: measured gap {gap} does not exceed {threshold}")]
    InsufficientAdvantage { gap: String, threshold: String },
    #[error("no local violation: gap {gap} does not exceed {threshold}")]
    NoLocalViolation { gap: String, threshold: String },
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("parameter regime unmet: {0}")]
    RegimeUnmet(String),
    #[error("greedy potential descent failed: {0}")]
    GreedyFailure(String),
    #[error("pipeline stage `{stage}` failed: {message}")]
    Pipeline { stage: String, message: String },
}

pub type Result<T> = std::result::Result<T, ApxError>;
