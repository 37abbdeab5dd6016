use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoBracket { what: String, lo: f64, hi: f64 },
    #[error("no nontrivial fixed points for eps = {eps} (BP threshold {eps_bp})")]
    NoNontrivialFixedPoint { eps: f64, eps_bp: f64 },
    #[error("iteration did not converge after {iterations} steps (last change {last_change:e})")]
    NoConvergence {
        iterations: usize,
        last_change: f64,
        last_iterate: Vec<f64>,
    },
    #[error("entropy target {chi} unreachable: {reason}")]
    Unreachable { chi: f64, reason: String },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("empty selection: {0}")]
    Empty(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParams(msg.into()))
}
