use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} outside path domain [{start}, {end}]")]
    Domain { t: f64, start: f64, end: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("paths have different horizons: [{0}, {1}] vs [{2}, {3}]")]
    HorizonMismatch(f64, f64, f64, f64),

    #[error("cannot mix exact and float values")]
    ModeMismatch,

    #[error("result of {0} is not representable as a dyadic rational")]
    Inexact(&'static str),

    #[error("integrator decreases on segment {segment}")]
    DecreasingIntegrator { segment: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid construction: {0}")]
    ConstructionInvalid(String),

    #[error("no admissible support set at step {step}")]
    StepInfeasible { step: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
