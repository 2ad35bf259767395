use thiserror::Error;

use crate::model::Variant;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter point is degenerate (r = 0)")]
    DegeneratePoint,
    #[error("time {t} lies outside [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("invalid path parameters: {0}")]
    InvalidPath(String),
    #[error("solver for path {expected} called with path {found}")]
    SolverMismatch { expected: Variant, found: Variant },
    #[error("gamma function pole at {0}")]
    PoleOfGamma(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{routine} did not converge: {detail}")]
    NoConvergence {
        routine: &'static str,
        detail: String,
    },
    #[error("argument {0} outside the domain [-1/e, 0)")]
    OutOfDomain(f64),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("integrator exhausted {max_steps} steps before reaching t = {t}")]
    ToleranceNotMet { t: f64, max_steps: usize },
    #[error("time grids differ")]
    GridMismatch,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
