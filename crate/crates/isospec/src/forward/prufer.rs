//! Dirichlet eigenvalues by matched two-sided Prufer shooting.
//!
//! Writing u = r sin(theta), u' = r cos(theta) turns the eigenvalue problem
//! into a phase equation theta' = cos^2(theta) + (E - V) sin^2(theta). A
//! forward phase starts at theta(0) = 0 and a backward phase at eta(L) = pi
//! (the zero at the right endpoint). Their difference at a matching point
//! x_m equals (j - 1) pi exactly at the j-th eigenvalue, for any x_m.
//!
//! Matching matters: one-sided shooting to L drives the phase through deep
//! classically forbidden regions where it locks onto the stable branch and
//! the eigencondition at L loses all sensitivity. The backward leg instead
//! crosses the forbidden region along its stable direction, so the matched
//! discrepancy keeps full resolution. x_m is re-derived from the turning
//! point per energy while bracketing and frozen before the final polish so
//! the polished function is smooth.

use crate::error::{Error, Result};
use crate::grid::GridPotential;
use crate::ode;
use std::f64::consts::PI;

/// Outcome of an eigenvalue solve: the j-th entries describe the j-th
/// Dirichlet eigenvalue, phase residual |D(E) - (j-1) pi|, and the number of
/// matched-phase evaluations spent on it.
#[derive(Debug, Clone)]
pub struct EigenSolveReport {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: Vec<u32>,
}

fn matching_point(pot: &GridPotential, e: f64) -> f64 {
    let margin = (3.0 * pot.h()).max(0.01 * pot.length());
    let turn = pot
        .samples()
        .iter()
        .rposition(|&v| v >= e)
        .map(|i| pot.node(i))
        .unwrap_or(0.0);
    (turn + margin).min(pot.length())
}

fn phase_rhs(pot: &GridPotential, e: f64) -> impl Fn(f64, &[f64; 1]) -> [f64; 1] + '_ {
    move |x, y| {
        let (s, c) = y[0].sin_cos();
        [c * c + (e - pot.value(x)) * s * s]
    }
}

/// theta(x_m) - eta(x_m); strictly increasing in E for fixed x_m and equal to
/// (j - 1) pi at the j-th eigenvalue for every x_m in (0, L].
fn matched_phase(pot: &GridPotential, e: f64, x_m: f64, ode_tol: f64) -> Result<f64> {
    let forward = if x_m > 0.0 {
        ode::integrate(&phase_rhs(pot, e), 0.0, x_m, [0.0], ode_tol)?[0]
    } else {
        0.0
    };
    let backward = if x_m < pot.length() {
        ode::integrate(&phase_rhs(pot, e), pot.length(), x_m, [PI], ode_tol)?[0]
    } else {
        PI
    };
    Ok(forward - backward)
}

/// Lowest `count` Dirichlet eigenvalues, ascending.
pub fn eigenvalues_matched(
    pot: &GridPotential,
    count: usize,
    eigen_tol: f64,
    ode_tol: f64,
) -> Result<EigenSolveReport> {
    let mut eigenvalues: Vec<f64> = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut iterations = Vec::with_capacity(count);
    let floor = pot.min_sample() - 1.0;

    for j in 1..=count {
        let target = (j - 1) as f64 * PI;
        let evals = std::cell::Cell::new(0u32);
        let d = |e: f64, x_m: f64| -> Result<f64> {
            evals.set(evals.get() + 1);
            Ok(matched_phase(pot, e, x_m, ode_tol)? - target)
        };

        // The previous eigenvalue is a valid lower endpoint: D there equals
        // the previous target, strictly below this one.
        let mut lo = *eigenvalues.last().unwrap_or(&floor);
        let mut hi = lo;
        let mut span = lo.abs().max(1.0) * 0.5;
        let mut bracketed = false;
        for _ in 0..64 {
            hi += span;
            span *= 2.0;
            if d(hi, matching_point(pot, hi))? > 0.0 {
                bracketed = true;
                break;
            }
            lo = hi;
        }
        if !bracketed {
            return Err(Error::BracketNotFound { index: j, limit: hi });
        }

        // Coarse bisection with the per-energy matching point. The sign of
        // D - target locates E_j for any matching point, so moving x_m
        // between evaluations is harmless here.
        while hi - lo > 1e-6 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if d(mid, matching_point(pot, mid))? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        // Freeze the matching point; polish on the now-smooth residual with
        // secant steps, falling back to bisection whenever a step leaves the
        // bracket.
        let x_m = matching_point(pot, 0.5 * (lo + hi));
        let mut a = lo;
        let mut b = hi;
        let mut fa = d(a, x_m)?;
        let mut fb = d(b, x_m)?;
        let root;
        let fr;
        loop {
            if fa == 0.0 {
                root = a;
                fr = 0.0;
                break;
            }
            if fb == 0.0 {
                root = b;
                fr = 0.0;
                break;
            }
            if b - a <= eigen_tol * b.abs().max(1.0) {
                // Linear interpolation across the final bracket.
                root = (a * fb - b * fa) / (fb - fa);
                fr = d(root, x_m)?;
                break;
            }
            if evals.get() > 400 {
                return Err(Error::NoConvergence {
                    what: format!("eigenvalue {j} polish"),
                    steps: evals.get() as usize,
                });
            }
            let secant = b - fb * (b - a) / (fb - fa);
            let x = if secant > a && secant < b {
                secant
            } else {
                0.5 * (a + b)
            };
            if x <= a || x >= b {
                root = (a * fb - b * fa) / (fb - fa);
                fr = d(root, x_m)?;
                break;
            }
            let fx = d(x, x_m)?;
            if (fx > 0.0) == (fb > 0.0) {
                b = x;
                fb = fx;
            } else {
                a = x;
                fa = fx;
            }
        }
        eigenvalues.push(root);
        residuals.push(fr.abs());
        iterations.push(evals.get());
    }

    Ok(EigenSolveReport { eigenvalues, residuals, iterations })
}
