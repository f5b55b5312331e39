use thiserror::Error;

/// Errors raised by the engine.
///
/// Verification failures are not errors; they come back as reports.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gw0Error {
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("invalid variable: {0}")]
    InvalidVariable(String),
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("not in normal form: {0}")]
    NotNormalForm(String),
    #[error("Lie algebra invariant violated at z^-{power}: {reason}")]
    LieInvariant { power: usize, reason: String },
    #[error("not symplectic: {0}")]
    NotSymplectic(String),
    #[error("S_1 is nonzero; the lower-triangular action needs S_1 = 0 (use the override to proceed)")]
    NonzeroS1,
    #[error("group element order {have} is too small; acting on level {zmax} needs order {need}")]
    GroupOrderTooSmall { have: usize, need: usize, zmax: usize },
    #[error("level out of range: {0}")]
    LevelOutOfRange(String),
    #[error("rank-one operation on a frame of dimension {0}")]
    NotRankOne(usize),
    #[error("cube extraction failed: {0}")]
    NotACube(String),
    #[error("linear form violates the rank-one constraints: {0}")]
    ConstraintViolation(String),
    #[error("reconstruction inconsistency: {0}")]
    Inconsistent(String),
    #[error("even coefficient alpha_{index} does not vanish")]
    EvenCoefficient { index: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Gw0Error>;
