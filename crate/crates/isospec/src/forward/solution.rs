//! Regular solutions, eigenfunction samples, and norming constants.

use crate::error::{Error, Result};
use crate::grid::GridPotential;
use crate::ode;
use crate::quad;

fn schrodinger_rhs(pot: &GridPotential, e: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |x, y| [y[1], (pot.value(x) - e) * y[0]]
}

/// (phi, phi') at the given ascending nodes for the solution with phi(0) = 0,
/// phi'(0) = 1.
pub fn solution_at_nodes(pot: &GridPotential, e: f64, nodes: &[f64]) -> Result<Vec<[f64; 2]>> {
    let mut out = vec![[0.0, 0.0]; nodes.len()];
    ode::integrate_nodes(
        &schrodinger_rhs(pot, e),
        nodes,
        [0.0, 1.0],
        ode::DEFAULT_ODE_TOL,
        |i, y| {
            out[i] = *y;
            true
        },
    )?;
    Ok(out)
}

/// The solution of -phi'' + V phi = E phi with phi(0) = 0, phi'(0) = 1,
/// sampled on the potential grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularSolution {
    pub energy: f64,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

/// Integrates the regular solution at E across the potential grid. E need
/// not be an eigenvalue; far below the potential the solution grows like
/// exp(x sqrt(V - E)) and the integrator reports overflow once it passes
/// the magnitude limit.
pub fn regular_solution(pot: &GridPotential, e: f64) -> Result<RegularSolution> {
    let nodes: Vec<f64> = (0..=pot.n()).map(|i| pot.node(i)).collect();
    let pairs = solution_at_nodes(pot, e, &nodes)?;
    let values = pairs.iter().map(|y| y[0]).collect();
    let derivatives = pairs.iter().map(|y| y[1]).collect();
    Ok(RegularSolution { energy: e, values, derivatives })
}

/// Relative amplitude below which the tail of a bound eigenfunction is
/// treated as exactly zero. Sits above the level where the exponentially
/// growing admixture caused by the eigenvalue tolerance bottoms out
/// (roughly sqrt of the relative eigenvalue error).
const TAIL_CUT: f64 = 1e-4;
/// Watch zone: once the amplitude is this far below peak, a rebound marks
/// the point where the growing admixture has taken over.
const TAIL_WATCH: f64 = 1e-3;
/// Largest tolerated boundary value, relative to the peak, when no decaying
/// tail was detected.
const BOUNDARY_CUT: f64 = 1e-6;

/// Samples of the regular solution at E on the uniform grid with n intervals,
/// with the decayed tail zeroed.
///
/// Once the scaled amplitude has fallen below TAIL_CUT times its running
/// peak, the solution has crossed into the classically forbidden region and
/// every further digit is noise that the shooting direction amplifies; the
/// remaining samples are set to zero. A rebound inside the watch zone (decay
/// that turns around before reaching the cut) means the noise took over
/// early; the tail is then zeroed from the observed minimum. If neither
/// happens the boundary value itself must be small, otherwise E is not an
/// eigenvalue of the Dirichlet problem and the error says how badly it
/// misses.
pub fn eigenfunction(pot: &GridPotential, e: f64, n: usize, ode_tol: f64) -> Result<Vec<f64>> {
    let length = pot.length();
    if n < 4 {
        return Err(Error::InvalidInput("eigenfunction grid needs n >= 4".into()));
    }
    let h = length / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let scale = (1.0 + (e - pot.min_sample()).abs()).sqrt();
    let mut phi = vec![0.0; n + 1];
    let mut peak = 0.0f64;
    let mut peak_phi = 0.0f64;
    let mut min_amp = f64::INFINITY;
    let mut min_index = usize::MAX;
    let mut cut = usize::MAX;
    ode::integrate_nodes(
        &schrodinger_rhs(pot, e),
        &nodes,
        [0.0, 1.0],
        ode_tol,
        |i, y| {
            let amp = y[0].abs().max(y[1].abs() / scale);
            peak = peak.max(amp);
            peak_phi = peak_phi.max(y[0].abs());
            if amp < TAIL_CUT * peak {
                cut = i;
                return false;
            }
            if amp < TAIL_WATCH * peak {
                if amp < min_amp {
                    min_amp = amp;
                    min_index = i;
                } else if amp > 4.0 * min_amp {
                    cut = min_index;
                    return false;
                }
            }
            phi[i] = y[0];
            true
        },
    )?;
    if cut == usize::MAX {
        let boundary_ratio = phi[n].abs() / peak_phi.max(f64::MIN_POSITIVE);
        if boundary_ratio > BOUNDARY_CUT {
            return Err(Error::NotAnEigenvalue { energy: e, boundary_ratio });
        }
        phi[n] = 0.0;
    } else {
        for p in phi.iter_mut().skip(cut) {
            *p = 0.0;
        }
    }
    Ok(phi)
}

/// Norming constants 1 / integral(phi_j^2) for each listed eigenvalue, with
/// the integral taken by composite Simpson on an n-interval grid.
pub fn norming_constants(
    pot: &GridPotential,
    energies: &[f64],
    n: usize,
    ode_tol: f64,
) -> Result<Vec<f64>> {
    let h = pot.length() / n as f64;
    energies
        .iter()
        .enumerate()
        .map(|(index, &e)| {
            let phi = eigenfunction(pot, e, n, ode_tol)?;
            let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
            let norm = quad::simpson(&sq, h);
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::NonpositiveWeight { index, value: norm });
            }
            Ok(1.0 / norm)
        })
        .collect()
}

/// Barrier suppression factor exp(-2 integral of sqrt(max(V - E, 0))) over
/// [0, L]: how strongly the right endpoint is shielded from the eigenvalue
/// at energy E. Values near 1 mean the truncation at L is visible at this
/// energy.
pub fn truncation_suppression(pot: &GridPotential, e: f64) -> f64 {
    let sq: Vec<f64> = pot.samples().iter().map(|&v| (v - e).max(0.0).sqrt()).collect();
    let s = quad::simpson(&sq, pot.h());
    (-2.0 * s).exp()
}

/// Error unless every listed energy is suppressed at the truncation boundary
/// by at least `max_suppression`.
pub fn check_truncation(pot: &GridPotential, energies: &[f64], max_suppression: f64) -> Result<()> {
    for &e in energies {
        let suppression = truncation_suppression(pot, e);
        if suppression > max_suppression {
            return Err(Error::TruncationCheck { suppression, length: pot.length() });
        }
    }
    Ok(())
}
