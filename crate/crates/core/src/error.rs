use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the model, the integrators, the analysis routines and
/// the sweep/export machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("trace drift {drift:.3e} exceeds guard {guard:.3e} at t = {t}")]
    TraceDrift { t: f64, drift: f64, guard: f64 },

    #[error("negative eigenvalue {eigenvalue:.3e} exceeds guard {guard:.3e} at t = {t}")]
    PositivityViolation { t: f64, eigenvalue: f64, guard: f64 },

    #[error("adaptive step {dt:.3e} fell below the floor at t = {t}")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("amplitude norm drift {drift:.3e} at t = {t}")]
    NormDrift { t: f64, drift: f64 },

    #[error("window [{t_start}, {t_end}] contains no samples")]
    EmptyWindow { t_start: f64, t_end: f64 },

    #[error("{context}: {path}: {source}")]
    Io {
        context: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {path}: {message}")]
    Format {
        context: String,
        path: PathBuf,
        message: String,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Simulation time at which a guard tripped, if this is a guard error.
    pub fn time(&self) -> Option<f64> {
        match *self {
            Error::TraceDrift { t, .. }
            | Error::PositivityViolation { t, .. }
            | Error::StepUnderflow { t, .. }
            | Error::NormDrift { t, .. } => Some(t),
            _ => None,
        }
    }

    /// Whether the error comes from a physics guard tripping during integration.
    pub fn is_guard(&self) -> bool {
        self.time().is_some()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
