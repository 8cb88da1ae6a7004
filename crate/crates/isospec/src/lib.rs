//! Forward and inverse spectral computations for half-line Dirichlet
//! Schrodinger operators -u'' + V u on a truncated interval [0, L].
//!
//! The crate computes eigenvalues and norming constants of the truncated
//! operator, packages them as a discrete spectral measure, evaluates the
//! associated Weyl m-function and A-amplitude differences, deforms the
//! measure along affine weight paths, and reconstructs the deformed
//! potential through a finite-rank determinant formula.

pub mod afunc;
pub mod diff;
pub mod error;
pub mod forward;
pub mod grid;
pub mod interp;
pub mod io;
pub mod measure;
pub mod ode;
pub mod quad;
pub mod reconstruct;
pub mod verify;

pub use afunc::{
    a_kernel, a_regularized, default_eps_schedule, delta_a, interpolate_a, AFunction, AKind,
    AlphaGrid,
};
pub use reconstruct::{
    rank_one_oracle, reconstruct_at, reconstruct_at_with_table, reconstruct_path, OverlapTable,
    ReconstructionResult, SmoothnessDiagnostic,
};
pub use error::{Error, Result};
pub use forward::{spectral_measure, spectral_measure_with, EigenSolveReport, SolverConfig};
pub use forward::{regular_solution, RegularSolution};
pub use grid::{BoundarySpec, GridPotential};
pub use measure::{make_path, IsospectralPath, Provenance, SpectralMeasure};
pub use verify::{
    check_isospectral, comparison_count, path_report, path_report_with, EigenCheck,
    IsospectralityReport, PathRecord, VerifyTolerances,
};
