use thiserror::Error;

use crate::newton::NewtonStats;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("fitting pole: omega*dt = {0} must lie in [0, pi)")]
    FittingPole(f64),

    #[error("breather singularity at x = {x}, t = {t}")]
    BreatherSingularity { x: f64, t: f64 },

    #[error("newton iteration did not converge after {} iterations (residual {:e})", .0.iterations, .0.final_residual_norm)]
    NonConvergence(NewtonStats),

    #[error("singular jacobian block at index {0}")]
    SingularJacobian(usize),

    #[error("analytic jacobian disagrees with finite differences (relative discrepancy {0:e})")]
    JacobianMismatch(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::domain(format!("{what}: non-finite entry at index {i}"))),
        None => Ok(()),
    }
}

pub(crate) fn ensure_same_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
