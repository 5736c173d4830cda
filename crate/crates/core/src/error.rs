//! Error type shared by the covariance, channel, rate, and optimizer modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid photon number {0}: must be finite and nonnegative")]
    InvalidPhotonNumber(f64),

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("covariance matrix must be square with even dimension, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {0:.3e}")]
    NotSymmetric(f64),

    #[error("operation requires {expected} modes, got {got}")]
    BadModeCount { expected: usize, got: usize },

    #[error("unphysical covariance: {0}")]
    Unphysical(String),

    #[error("eigenvalue computation did not converge")]
    EigenFailure,

    #[error("closed-form rate requires the phase-sensitive noise pattern")]
    UnsupportedPattern,

    #[error("reference rate at eta = 0 is not positive; gain undefined")]
    DegenerateGain,
}

pub type Result<T> = std::result::Result<T, Error>;
