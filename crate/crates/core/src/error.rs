use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mean photon number must be finite and non-negative, got {0}")]
    InvalidMeanPhotonNumber(f64),

    #[error("tail tolerance must lie in (0, 1), got {0}")]
    InvalidTailTolerance(f64),

    #[error("dipole ratio alpha must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),

    #[error("frequency must be finite and positive, got {0}")]
    InvalidFrequency(f64),

    #[error("temperature must be finite and positive, got {0}")]
    InvalidTemperature(f64),

    #[error("oracle Fock cutoff {cutoff} is below the required minimum {required}")]
    OracleCutoffTooSmall { cutoff: usize, required: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("time grid must be nonempty and ascending")]
    InvalidGrid,

    #[error("invalid run specification: {0}")]
    InvalidRunSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
