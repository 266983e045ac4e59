use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("solver configuration: {0}")]
    SolverConfig(String),

    #[error("numerical failure at step {step} (t = {time:.6e} s): {reason}")]
    NumericalFailure { step: usize, time: f64, reason: String },

    #[error("control schedule: {0}")]
    Schedule(String),

    #[error(
        "integration window [{start:.6e}, {end:.6e}] s exceeds waveform grid [{grid_start:.6e}, {grid_end:.6e}] s"
    )]
    WindowOutOfGrid {
        start: f64,
        end: f64,
        grid_start: f64,
        grid_end: f64,
    },

    #[error("waveform has zero norm")]
    ZeroNorm,

    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error("acceptance check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::Schedule(_) => 2,
            Error::SolverConfig(_) => 2,
            Error::CheckFailed(_) => 4,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            _ => 3,
        }
    }
}
