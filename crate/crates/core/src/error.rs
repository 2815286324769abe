use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidSpec(String),
    #[error("point {point:?} outside the admissible domain: {reason}")]
    Domain { point: [f64; 3], reason: &'static str },
    #[error("ball of radius {radius} about {center:?} leaves the admissible domain")]
    BallOutsideDomain { center: [f64; 3], radius: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("p-Laplace operator is degenerate at a critical point (|grad u| = 0)")]
    DegeneratePoint,
    #[error("frequency undefined at r = {radius}: boundary mass {mass:e} below floor")]
    FrequencyUndefined { radius: f64, mass: f64 },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
