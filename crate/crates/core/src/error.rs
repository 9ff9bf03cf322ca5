use thiserror::Error;

use crate::special::DomainError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate parametrization: {0}")]
    DegenerateParametrization(String),

    #[error("chord excess is undefined for coincident parameters s = s' = {0}")]
    UndefinedPair(f64),

    #[error("chord-arc bound violated: c_hat = {c_hat:.6e} at pair ({s}, {s_prime})")]
    AssumptionViolation { c_hat: f64, s: f64, s_prime: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{what} did not converge (achieved {achieved:.3e})")]
    NonConvergence { what: String, achieved: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("mesh step {h} does not resolve the strip half-width {epsilon} (need h <= epsilon/4)")]
    MeshTooCoarse { h: f64, epsilon: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::Domain(_) => 1,
            Error::AssumptionViolation { .. } | Error::DegenerateParametrization(_) | Error::Geometry(_) => 2,
            Error::NonConvergence { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
