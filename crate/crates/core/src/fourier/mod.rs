//! Discrete Fourier analysis of measurement functions.
//!
//! A station strategy with a fixed hidden variable is a `±1` function on the
//! setting grid ([`FunctionTable`]). For an antipodal pair (`B = -A`) with
//! uniformly drawn settings a fixed offset `θ_t` apart, the expected product
//! of outcomes is
//!
//! ```text
//! C[t] = -(1/M) Σ_j A[j]·A[j-t]  =  -Σ_k |Ã(k)|² cos(2πkt/M)
//! ```
//!
//! and Parseval forces `Σ_k |Ã(k)|² = 1`. An exact `-k·cos θ` would need all
//! spectral mass on `k = ±1`, which no `±1` function has; [`certificate`]
//! makes that quantitative.

mod certificate;
mod correlation;
mod dft;
mod expected;
mod fit;
pub mod io;
mod table;

pub use certificate::{
    half_plane_first_coefficient, impossibility_certificate, max_first_coefficient, CertificateReport, ExtremumSearch,
    InfeasibilityReason, EXHAUSTIVE_LIMIT,
};
pub use correlation::{
    autocorrelation_direct, autocorrelation_spectral, cross_correlation_spectral, cross_spectrum, CorrelationFunction,
};
pub use dft::{dft, inverse_dft, PowerPlan, Spectrum};
pub use expected::{expected_correlation, ExactCosineCheck, SpectrumReport};
pub use fit::{cosine_fit, CosineFit};
pub use table::FunctionTable;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("table has {got} values for a {expected}-point grid")]
    LengthMismatch { expected: usize, got: usize },

    #[error("table value {value} at index {index} is not ±1")]
    NotPlusMinusOne { index: usize, value: i64 },

    #[error("tables live on different grids ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },

    #[error("spectrum is not conjugate-symmetric (max asymmetry {0:e}); source table was not real")]
    NotRealSource(f64),

    #[error("strategy `{0}` uses memory and has no single-function Fourier representation")]
    MemoryStrategy(String),

    #[error("need at least one hidden-variable draw")]
    NoDraws,

    #[error("target amplitude {0} outside [0, 1]")]
    AmplitudeOutOfRange(f64),

    #[error(transparent)]
    Model(#[from] crate::ModelError),
}
