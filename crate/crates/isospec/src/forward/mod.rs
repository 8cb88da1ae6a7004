//! Forward spectral problem: eigenvalues, norming constants, m-functions.

pub mod mfunc;
pub mod prufer;
pub mod solution;

pub use mfunc::{
    fit_m_constant, free_m, free_measure_density, m_from_measure, sqrt_upper, weyl_m_ode,
    MFunctionFit, NEAR_AXIS_THRESHOLD,
};
pub use prufer::{eigenvalues_matched, EigenSolveReport};
pub use solution::{
    check_truncation, eigenfunction, norming_constants, regular_solution, solution_at_nodes,
    truncation_suppression, RegularSolution,
};

use crate::error::Result;
use crate::grid::GridPotential;
use crate::measure::{Provenance, SpectralMeasure};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative eigenvalue tolerance.
    pub eigen_tol: f64,
    /// Per-unit-length tolerance handed to the adaptive integrator.
    pub ode_tol: f64,
    /// Quadrature intervals for the norming integrals; None picks a grid
    /// from the top eigenvalue so the Simpson error stays near 1e-10.
    pub quad_n: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { eigen_tol: 1e-10, ode_tol: 1e-11, quad_n: None }
    }
}

/// Composite-Simpson relative error model for an eigenfunction oscillating at
/// wavenumber 2 sqrt(E): (L h^4 / 180) (2 sqrt(E))^4.
fn quad_rel_error(length: f64, n: usize, e_max: f64) -> f64 {
    let h = length / n as f64;
    length * h.powi(4) / 180.0 * 16.0 * e_max * e_max
}

fn auto_quad_n(length: f64, e_max: f64) -> usize {
    let e = e_max.abs().max(1.0);
    let h = (180.0 * 1e-10 / (16.0 * e * e * length)).powf(0.25);
    let mut n = (length / h).ceil() as usize;
    n = n.clamp(2000, 400_000);
    n + (n & 1)
}

/// Lowest `count` Dirichlet eigenvalues of -u'' + V u on [0, L].
pub fn eigenvalues(
    pot: &GridPotential,
    count: usize,
    cfg: &SolverConfig,
) -> Result<EigenSolveReport> {
    prufer::eigenvalues_matched(pot, count, cfg.eigen_tol, cfg.ode_tol)
}

/// Truncated spectral measure with `count` atoms, plus the solve report.
pub fn spectral_measure_with(
    pot: &GridPotential,
    count: usize,
    cfg: &SolverConfig,
) -> Result<(SpectralMeasure, EigenSolveReport)> {
    let report = eigenvalues(pot, count, cfg)?;
    let e_max = report.eigenvalues.last().copied().unwrap_or(1.0);
    let quad_n = cfg.quad_n.unwrap_or_else(|| auto_quad_n(pot.length(), e_max));
    let weights = solution::norming_constants(pot, &report.eigenvalues, quad_n, cfg.ode_tol)?;
    let provenance = Provenance {
        source_label: pot.label().to_string(),
        length: pot.length(),
        n: pot.n(),
        j_count: count,
        eigen_tol: cfg.eigen_tol,
        quad_tol: quad_rel_error(pot.length(), quad_n, e_max),
    };
    let measure = SpectralMeasure::new(report.eigenvalues.clone(), weights, provenance)?;
    Ok((measure, report))
}

/// Truncated spectral measure with default configuration.
pub fn spectral_measure(pot: &GridPotential, count: usize) -> Result<SpectralMeasure> {
    Ok(spectral_measure_with(pot, count, &SolverConfig::default())?.0)
}
