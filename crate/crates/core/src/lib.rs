//! Adaptive detection of range-migrating targets.
//!
//! A target moving in range may enter or leave the cell under test during the
//! coherent processing interval, so only a contiguous run of pulses `l, …, l+h`
//! carries its echo. The detectors in [`detectors`] estimate that run with a
//! generalized information criterion (GIC) and either threshold a second-stage
//! statistic or fold detection and estimation into one statistic.
//! [`montecarlo`] calibrates thresholds to a false-alarm rate and measures
//! detection probability and support-estimation error against SINR.
//!
//! The numerical kernels, the scenario model and the detectors are generic over
//! the real scalar type ([`Real`], implemented for `f32` and `f64`); the
//! Monte Carlo engine runs in `f64`. Aliases for both precisions are exported here.

pub mod config;
pub mod detectors;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod rng;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type ComplexVector64 = linalg::ComplexVector<f64>;
pub type HermitianPd64 = linalg::HermitianPd<f64>;
pub type CellStatistics64 = detectors::CellStatistics<f64>;
pub type SelectionResult64 = detectors::SelectionResult<f64>;
pub type DetectorOutput64 = detectors::DetectorOutput<f64>;
pub type TrialData64 = scenario::TrialData<f64>;
pub type TrialModel64 = scenario::TrialModel<f64>;

pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type ComplexVector32 = linalg::ComplexVector<f32>;
pub type HermitianPd32 = linalg::HermitianPd<f32>;
pub type CellStatistics32 = detectors::CellStatistics<f32>;
pub type TrialData32 = scenario::TrialData<f32>;
pub type TrialModel32 = scenario::TrialModel<f32>;
