use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} is non-positive or non-finite)")]
    NotPositiveDefinite { pivot: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite or empty data: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training size K={n_training} is smaller than the array size N_a={n_antennas}")]
    InsufficientTraining {
        n_training: usize,
        n_antennas: usize,
    },

    #[error("{n_trials} trials at P_fa={target_pfa:e} leave fewer than 10 expected exceedances")]
    InsufficientTrials { n_trials: usize, target_pfa: f64 },

    #[error("threshold was calibrated for config {found}, current config is {expected}")]
    ConfigMismatch { expected: String, found: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
