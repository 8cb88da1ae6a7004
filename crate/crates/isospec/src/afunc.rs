//! The A-transform of a spectral measure and of differences of measures.
//!
//! For two measures sharing a spectrum the difference transform is a finite
//! sum over the atoms where the weights differ and needs no regularization.
//! A single measure only has a well defined transform after subtracting the
//! free background and sending the exponential damping to zero; that route
//! reports, next to each value, a residual estimating how far the
//! extrapolation actually settled.

use crate::error::{Error, Result};
use crate::measure::SpectralMeasure;

/// Uniform grid of alpha values on [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    lo: f64,
    hi: f64,
    count: usize,
}

impl AlphaGrid {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi <= lo {
            return Err(Error::InvalidInput(format!(
                "alpha grid needs 0 <= lo < hi, got [{lo}, {hi}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidInput(format!(
                "alpha grid needs at least 2 points, got {count}"
            )));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        if i + 1 == self.count {
            self.hi
        } else {
            self.lo + i as f64 * step
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

/// Which route produced an AFunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AKind {
    /// Finite atom sum over a weight difference; exact up to rounding.
    Difference,
    /// Damped single-measure transform extrapolated to zero damping.
    Regularized,
}

impl AKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AKind::Difference => "difference",
            AKind::Regularized => "regularized",
        }
    }
}

/// Sampled A-function with a per-point error estimate.
///
/// For the difference route the residuals are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AFunction {
    kind: AKind,
    alphas: Vec<f64>,
    values: Vec<f64>,
    residuals: Vec<f64>,
}

impl AFunction {
    pub fn kind(&self) -> AKind {
        self.kind
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// Relative size of the expansion variable below which the kernel switches
/// to its Taylor series; the first omitted term is then below 1e-19.
const KERNEL_SERIES_CUT: f64 = 1e-6;

/// The kernel sin(2 alpha sqrt(lambda)) / sqrt(lambda), continued through
/// lambda <= 0 (sinh branch below, 2 alpha at zero).
pub fn a_kernel(lambda: f64, alpha: f64) -> f64 {
    let u2 = 4.0 * alpha * alpha * lambda;
    if u2.abs() < KERNEL_SERIES_CUT {
        return 2.0 * alpha * (1.0 - u2 / 6.0 + u2 * u2 / 120.0);
    }
    let root = lambda.abs().sqrt();
    if lambda > 0.0 {
        (2.0 * alpha * root).sin() / root
    } else {
        (2.0 * alpha * root).sinh() / root
    }
}

/// A-function of the difference target minus base over a shared spectrum.
///
/// The atoms must coincide bitwise; a path built by IsospectralPath
/// guarantees that. Terms are summed in ascending energy order so equal
/// inputs give equal outputs bit for bit.
pub fn delta_a(
    base: &SpectralMeasure,
    target: &SpectralMeasure,
    grid: &AlphaGrid,
) -> Result<AFunction> {
    if base.len() != target.len() {
        return Err(Error::LengthMismatch(format!(
            "measures carry {} and {} atoms",
            base.len(),
            target.len()
        )));
    }
    for (index, (&l, &r)) in base.energies().iter().zip(target.energies()).enumerate() {
        if l.to_bits() != r.to_bits() {
            return Err(Error::SpectrumMismatch { index, left: l, right: r, tol: 0.0 });
        }
    }
    let alphas = grid.points();
    let values: Vec<f64> = alphas
        .iter()
        .map(|&alpha| {
            let mut sum = 0.0;
            for ((&e, &wb), &wt) in base
                .energies()
                .iter()
                .zip(base.weights())
                .zip(target.weights())
            {
                sum += (wt - wb) * a_kernel(e, alpha);
            }
            // + 0.0 turns an exact -0.0 into +0.0 and changes nothing else.
            -2.0 * sum + 0.0
        })
        .collect();
    let residuals = vec![0.0; alphas.len()];
    Ok(AFunction { kind: AKind::Difference, alphas, values, residuals })
}

/// Difference A-function scaled to an intermediate path parameter. Only the
/// difference kind scales; the regularized transform of one measure is not
/// linear in anything. t = 1 returns a bitwise copy.
pub fn interpolate_a(full: &AFunction, t: f64) -> Result<AFunction> {
    if full.kind != AKind::Difference {
        return Err(Error::KindMismatch { left: AKind::Difference.as_str(), right: full.kind.as_str() });
    }
    if t == 1.0 {
        return Ok(full.clone());
    }
    Ok(AFunction {
        kind: AKind::Difference,
        alphas: full.alphas.clone(),
        // + 0.0 keeps t = 0 from stamping -0.0 on negative values.
        values: full.values.iter().map(|&v| t * v + 0.0).collect(),
        residuals: full.residuals.iter().map(|&r| t.abs() * r).collect(),
    })
}

/// Largest damping parameter in the extrapolation schedule.
const EPS_TOP: f64 = 1e-2;
/// Number of halvings in the schedule. Ten levels reach 2e-5, deep enough
/// that the free background term has died off for any alpha above ~0.05.
const EPS_LEVELS: usize = 10;

/// Damping schedule used when the caller has no reason to pick another:
/// EPS_LEVELS halvings starting at EPS_TOP.
pub fn default_eps_schedule() -> Vec<f64> {
    (0..EPS_LEVELS).map(|i| EPS_TOP / (1u64 << i) as f64).collect()
}

/// Background contribution of the free measure to the damped transform:
/// the integral of the kernel against sqrt(E)/pi dE with damping
/// exp(-eps E). In the momentum variable it is a Gaussian sine moment with
/// the closed value alpha eps^{-3/2} pi^{-1/2} exp(-alpha^2/eps).
fn free_term(alpha: f64, eps: f64) -> f64 {
    alpha * eps.powf(-1.5) * std::f64::consts::PI.sqrt().recip() * (-alpha * alpha / eps).exp()
}

/// Polynomial extrapolation of (nodes, values) to zero via a Neville
/// tableau, returning the entry with the smallest neighbor difference and
/// that difference as its residual. A sequence whose raw increments grow
/// strictly is reported as divergent instead.
fn extrapolate_to_zero(nodes: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    let n = nodes.len();
    assert!(n >= 2 && n == values.len());
    let mut growing = true;
    let mut prev = -1.0;
    for pair in values.windows(2) {
        let d = (pair[1] - pair[0]).abs();
        if d <= prev {
            growing = false;
            break;
        }
        prev = d;
    }
    if growing && n >= 3 {
        return Err(Error::ExtrapolationDiverged);
    }
    let mut rows: Vec<Vec<f64>> = vec![vec![values[0]]];
    let mut best = (f64::INFINITY, values[n - 1]);
    for i in 1..n {
        let mut row = vec![values[i]];
        let raw = (values[i] - values[i - 1]).abs();
        if raw <= best.0 {
            best = (raw, values[i]);
        }
        for j in 1..=i {
            let far = nodes[i - j];
            let t = (far * row[j - 1] - nodes[i] * rows[i - 1][j - 1]) / (far - nodes[i]);
            let r = (t - row[j - 1]).abs();
            if r <= best.0 {
                best = (r, t);
            }
            row.push(t);
        }
        rows.push(row);
    }
    Ok((best.1, best.0))
}

/// Regularized A-function of a single measure: atom sum minus the free
/// background under exponential damping at each epsilon of the schedule,
/// extrapolated to zero damping. The residual column reports how well the
/// extrapolation settled at each alpha; values are only trustworthy where
/// the residual is small.
pub fn a_regularized(
    measure: &SpectralMeasure,
    grid: &AlphaGrid,
    schedule: &[f64],
) -> Result<AFunction> {
    if schedule.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "damping schedule needs at least 2 levels, got {}",
            schedule.len()
        )));
    }
    for pair in schedule.windows(2) {
        if !(pair[1] > 0.0 && pair[1] < pair[0] && pair[0].is_finite()) {
            return Err(Error::InvalidInput(format!(
                "damping schedule must decrease through positive values, got {pair:?}"
            )));
        }
    }
    if grid.point(0) <= 0.0 {
        return Err(Error::InvalidInput(
            "the regularized transform is not evaluated at alpha = 0".into(),
        ));
    }
    let eps = schedule;
    let alphas = grid.points();
    let mut values = Vec::with_capacity(alphas.len());
    let mut residuals = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let damped: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let mut sum = 0.0;
                for (energy, weight) in measure.iter() {
                    sum += weight * a_kernel(energy, alpha) * (-e * energy).exp();
                }
                -2.0 * (sum - free_term(alpha, e))
            })
            .collect();
        let (value, residual) = extrapolate_to_zero(eps, &damped)?;
        values.push(value);
        residuals.push(residual);
    }
    Ok(AFunction { kind: AKind::Regularized, alphas, values, residuals })
}
