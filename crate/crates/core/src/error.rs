use thiserror::Error;

/// Errors produced by the library.
///
/// Variants split into two families: configuration/validation problems
/// (the caller asked for something ill-formed) and numerical failures
/// (a well-formed request that a solver could not complete).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigenvalue vector {lambda:?} lies outside the {cone} cone")]
    ConeViolation { lambda: Vec<f64>, cone: String },

    #[error("{0} has no continuous extension to the cone boundary")]
    NotExtendable(String),

    #[error("no bracket for level {level} at y = {y}: {reason}")]
    NoBracket { y: f64, level: f64, reason: String },

    #[error("no root for the radial curvature at r = {r}, v = {v}: tangential part already reaches the speed")]
    NoRoot { r: f64, v: f64 },

    #[error("monotonicity violated during bisection near x = {x}")]
    MonotonicityViolated { x: f64 },

    #[error("step controller underflow at r = {r} (v = {v}, u = {u}, h = {h})")]
    StepFailure { r: f64, v: f64, u: f64, h: f64 },

    #[error("profile is not entire: {0}")]
    NotEntire(String),

    #[error("profile is not ball-type: {0}")]
    NotBall(String),

    #[error("precondition violated at {point:?}: {reason}")]
    PreconditionViolation { point: Vec<f64>, reason: String },

    #[error("samples do not overlap")]
    NoOverlap,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by a malformed request rather than a solver failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::DimensionMismatch { .. }
                | Error::NotExtendable(_)
                | Error::Parse(_)
                | Error::NoOverlap
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
