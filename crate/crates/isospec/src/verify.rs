//! Isospectrality certification: re-solve reconstructed potentials and
//! report how well their spectra and norming constants track the path data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{self, SolverConfig};
use crate::grid::GridPotential;
use crate::measure::IsospectralPath;
use crate::quad::trapezoid_prefix;
use crate::reconstruct::{reconstruct_at_with_table, OverlapTable};

/// Acceptance thresholds for a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    /// Largest accepted relative eigenvalue deviation.
    pub eigen_rel: f64,
    /// Largest accepted relative norming-constant deviation on the moved
    /// atoms.
    pub weight_rel: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances { eigen_rel: 1e-5, weight_rel: 1e-4 }
    }
}

/// Outcome of one spectrum comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCheck {
    pub eig_dev: f64,
    pub pass: bool,
}

/// Verification outcome at one path parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathRecord {
    pub t: f64,
    pub eig_dev: f64,
    pub weight_dev: f64,
    pub det_positive: bool,
    pub pass: bool,
}

/// Whole-path verification: one record per requested t, the global verdict,
/// and the L1 increments between consecutive reconstructions on [0, r].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsospectralityReport {
    pub tolerances: VerifyTolerances,
    pub records: Vec<PathRecord>,
    pub pass: bool,
    pub l1_increments: Vec<f64>,
    pub r: f64,
}

/// Solves for the lowest `j_prime` eigenvalues of `pot` and compares them
/// with the leading targets. A deviation beyond `tol` fails the check but is
/// not an error; errors are reserved for the solver itself.
pub fn check_isospectral(
    pot: &GridPotential,
    target: &[f64],
    j_prime: usize,
    tol: f64,
) -> Result<EigenCheck> {
    if j_prime < 1 || j_prime > target.len() {
        return Err(Error::InvalidInput(format!(
            "need 1 <= J' <= {} target eigenvalues, got J' = {j_prime}",
            target.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("comparison tolerance {tol} must be positive")));
    }
    let report = forward::eigenvalues(pot, j_prime, &SolverConfig::default())?;
    let eig_dev = deviation(&report.eigenvalues, &target[..j_prime]);
    Ok(EigenCheck { eig_dev, pass: eig_dev <= tol })
}

fn deviation(got: &[f64], target: &[f64]) -> f64 {
    got.iter()
        .zip(target)
        .map(|(&g, &t)| (g - t).abs() / t.abs())
        .fold(0.0, f64::max)
}

/// Margin kept below the truncated spectrum when re-checking eigenvalues:
/// the moved atoms are excluded and two more are dropped from the top,
/// where the Dirichlet wall at L is felt first.
pub fn comparison_count(path: &IsospectralPath) -> Result<usize> {
    let j_prime = path.len() as isize - path.support().len() as isize - 2;
    if j_prime < 1 {
        return Err(Error::InvalidInput(format!(
            "path with J = {} atoms and {} moved leaves no eigenvalues to compare",
            path.len(),
            path.support().len()
        )));
    }
    Ok(j_prime as usize)
}

/// Certifies the path at the given parameters with r = L / 2.
pub fn path_report(
    path: &IsospectralPath,
    pot0: &GridPotential,
    t_samples: &[f64],
    tolerances: VerifyTolerances,
) -> Result<IsospectralityReport> {
    path_report_with(path, pot0, t_samples, tolerances, pot0.length() / 2.0)
}

/// Certifies the path at the given parameters: reconstructs each V_t from
/// one shared overlap table, re-solves its spectrum and norming constants,
/// and measures the L1([0, r]) distance between consecutive potentials.
/// The parameters must increase strictly; the report passes exactly when
/// every record does.
pub fn path_report_with(
    path: &IsospectralPath,
    pot0: &GridPotential,
    t_samples: &[f64],
    tolerances: VerifyTolerances,
    r: f64,
) -> Result<IsospectralityReport> {
    if t_samples.is_empty() {
        return Err(Error::InvalidInput("no path parameters to verify".into()));
    }
    if t_samples.windows(2).any(|p| !(p[1] > p[0])) || t_samples.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "path parameters must increase strictly, got {t_samples:?}"
        )));
    }
    if !(r > 0.0 && r <= pot0.length()) {
        return Err(Error::InvalidInput(format!(
            "comparison radius r = {r} outside (0, {}]",
            pot0.length()
        )));
    }
    let support = path.support();
    let j_prime = comparison_count(path)?;
    let solve_count = support.iter().map(|&j| j + 1).max().unwrap_or(0).max(j_prime);
    let targets = &path.base().energies()[..j_prime];
    let table = OverlapTable::build(pot0, path.base(), &support, crate::ode::DEFAULT_ODE_TOL)?;
    let cfg = SolverConfig::default();

    let mut records = Vec::with_capacity(t_samples.len());
    let mut potentials = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let rec = reconstruct_at_with_table(path, pot0, t, &table)?;
        let det_positive = rec.min_det > 0.0;
        let (resolved, _) = forward::spectral_measure_with(&rec.potential, solve_count, &cfg)?;
        let eig_dev = deviation(&resolved.energies()[..j_prime], targets);
        let expected = path.measure_at(t)?;
        let weight_dev = support
            .iter()
            .map(|&j| {
                let want = expected.weights()[j];
                (resolved.weights()[j] - want).abs() / want
            })
            .fold(0.0, f64::max);
        let pass =
            det_positive && eig_dev <= tolerances.eigen_rel && weight_dev <= tolerances.weight_rel;
        records.push(PathRecord { t, eig_dev, weight_dev, det_positive, pass });
        potentials.push(rec.potential);
    }

    let mut l1_increments = Vec::with_capacity(potentials.len().saturating_sub(1));
    let h = pot0.h();
    let nodes_in_r = ((r / h) as usize).min(pot0.n());
    for pair in potentials.windows(2) {
        let gap: Vec<f64> = pair[0]
            .samples()
            .iter()
            .zip(pair[1].samples())
            .map(|(a, b)| (b - a).abs())
            .collect();
        l1_increments.push(trapezoid_prefix(&gap, h, nodes_in_r));
    }

    let pass = records.iter().all(|rec| rec.pass);
    Ok(IsospectralityReport { tolerances, records, pass, l1_increments, r })
}
