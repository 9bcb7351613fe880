use thiserror::Error;

/// Failures raised by the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("time step underflow at t = {t:.6e} (dt = {dt:.3e})")]
    StepFailure { t: f64, dt: f64 },
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("no sign change found: {0}")]
    BracketFailure(String),
    #[error("convergence check failed: {0}")]
    ConvergenceFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for numerical trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::Domain(_) => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
