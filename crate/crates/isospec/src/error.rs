use num_complex::Complex64;
use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the stage that raises them:
/// input validation, forward solves, path construction, reconstruction, IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no bracket for eigenvalue {index}: phase target not reached below E = {limit:.6e}")]
    BracketNotFound { index: usize, limit: f64 },

    #[error("{what} did not converge within {steps} steps")]
    NoConvergence { what: String, steps: usize },

    #[error("solution magnitude exceeded {limit:.1e}; use a shorter interval or rescaled (log-derivative) integration")]
    Overflow { limit: f64 },

    #[error("E = {energy:.12e} is not an eigenvalue: |phi(L)|/max|phi| = {boundary_ratio:.3e}")]
    NotAnEigenvalue { energy: f64, boundary_ratio: f64 },

    #[error("z = {z} is within {threshold:.1e} of the real axis; the Weyl solution is not damped there")]
    NearRealAxis { z: Complex64, threshold: f64 },

    #[error("z coincides with eigenvalue {index} (E = {energy:.12e})")]
    PoleAtEigenvalue { index: usize, energy: f64 },

    #[error("spectra differ at index {index}: {left:.12e} vs {right:.12e} (tol {tol:.1e})")]
    SpectrumMismatch {
        index: usize,
        left: f64,
        right: f64,
        tol: f64,
    },

    #[error("weight {index} would become nonpositive ({value:.6e})")]
    NonpositiveWeight { index: usize, value: f64 },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("alpha grids differ; A-functions combine only on a shared grid")]
    GridMismatch,

    #[error("A-function kinds differ ({left} vs {right})")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("Abel extrapolation diverged: residuals grow along the epsilon schedule")]
    ExtrapolationDiverged,

    #[error("det(I + DP) = {value:.6e} at x = {x:.6}; weights violate positivity")]
    NonpositiveDeterminant { x: f64, value: f64 },

    #[error("provenance mismatch: '{left}' vs '{right}'")]
    ProvenanceMismatch { left: String, right: String },

    #[error("truncation check: tail suppression {suppression:.3e} at L = {length} is above the requested bound")]
    TruncationCheck { suppression: f64, length: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed {kind} file {path}: {detail}")]
    Malformed {
        kind: &'static str,
        path: PathBuf,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
