//! Discrete spectral measures and affine isospectral deformations.
//!
//! A measure is a finite list of strictly increasing energies with positive
//! weights, tagged with the provenance of the solve that produced it. Paths
//! keep the energies bitwise fixed and move only the weights; evaluation at
//! interior parameters uses a single fused multiply-add per weight so that
//! dyadic parameters combined with exactly representable weight differences
//! stay exact in floating point.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Where a measure came from: enough to recognize whether two measures (or a
/// measure and a potential) talk about the same operator and resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source_label: String,
    pub length: f64,
    pub n: usize,
    pub j_count: usize,
    pub eigen_tol: f64,
    pub quad_tol: f64,
}

impl Provenance {
    /// Same operator and comparable resolution; j_count may differ (a prefix
    /// of a longer solve is still the same measure family).
    pub fn compatible(&self, other: &Provenance) -> bool {
        self.source_label == other.source_label
            && self.length == other.length
            && self.n == other.n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    energies: Vec<f64>,
    weights: Vec<f64>,
    pub provenance: Provenance,
}

impl SpectralMeasure {
    /// Empty measures are legal: they represent the reference (free) measure
    /// with no discrete part and are the natural base case for A-amplitude
    /// regularization.
    pub fn new(energies: Vec<f64>, weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if energies.len() != weights.len() {
            return Err(Error::LengthMismatch(format!(
                "{} energies vs {} weights",
                energies.len(),
                weights.len()
            )));
        }
        if !energies.iter().all(|e| e.is_finite()) {
            return Err(Error::InvalidInput("non-finite energy".into()));
        }
        if !energies.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "energies must be strictly increasing".into(),
            ));
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonpositiveWeight { index, value: w });
            }
        }
        Ok(SpectralMeasure { energies, weights, provenance })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies.iter().copied().zip(self.weights.iter().copied())
    }

    /// New measure with additive weight changes at the given 0-based indices.
    /// Energies and provenance carry over unchanged.
    pub fn perturb_weights(&self, deltas: &BTreeMap<usize, f64>) -> Result<Self> {
        let mut weights = self.weights.clone();
        for (&index, &delta) in deltas {
            let w = weights.get_mut(index).ok_or(Error::InvalidInput(format!(
                "perturbation index {index} out of range (J = {})",
                self.energies.len()
            )))?;
            let moved = *w + delta;
            if !(moved > 0.0 && moved.is_finite()) {
                return Err(Error::NonpositiveWeight { index, value: moved });
            }
            *w = moved;
        }
        SpectralMeasure::new(self.energies.clone(), weights, self.provenance.clone())
    }
}

/// Affine deformation between two measures over the same spectrum. The
/// endpoint energies must agree within `tol` at construction; afterwards the
/// target is canonicalized onto the base energies bitwise so every evaluation
/// along the path shares one spectrum.
#[derive(Debug, Clone)]
pub struct IsospectralPath {
    base: SpectralMeasure,
    target: SpectralMeasure,
    tol: f64,
}

impl IsospectralPath {
    pub fn new(base: SpectralMeasure, target: SpectralMeasure, tol: f64) -> Result<Self> {
        if !base.provenance.compatible(&target.provenance) {
            return Err(Error::ProvenanceMismatch {
                left: base.provenance.source_label.clone(),
                right: target.provenance.source_label.clone(),
            });
        }
        if base.len() != target.len() {
            return Err(Error::LengthMismatch(format!(
                "base J = {} vs target J = {}",
                base.len(),
                target.len()
            )));
        }
        for (index, (&left, &right)) in base.energies.iter().zip(&target.energies).enumerate() {
            if (left - right).abs() > tol * left.abs().max(1.0) {
                return Err(Error::SpectrumMismatch { index, left, right, tol });
            }
        }
        let target = SpectralMeasure::new(
            base.energies.clone(),
            target.weights,
            target.provenance,
        )?;
        Ok(IsospectralPath { base, target, tol })
    }

    /// Path from additive weight perturbations of `base`.
    pub fn from_perturbation(
        base: SpectralMeasure,
        deltas: &BTreeMap<usize, f64>,
    ) -> Result<Self> {
        let target = base.perturb_weights(deltas)?;
        Ok(IsospectralPath { base, target, tol: 0.0 })
    }

    pub fn base(&self) -> &SpectralMeasure {
        &self.base
    }

    pub fn target(&self) -> &SpectralMeasure {
        &self.target
    }

    /// Spectrum-match tolerance accepted at construction; zero for paths
    /// built by perturbation, whose endpoints share the spectrum bitwise.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Indices whose weights actually move.
    pub fn support(&self) -> Vec<usize> {
        (0..self.base.len())
            .filter(|&j| self.target.weights[j] != self.base.weights[j])
            .collect()
    }

    /// Weight increments target - base, all indices.
    pub fn deltas(&self) -> Vec<f64> {
        self.base
            .weights
            .iter()
            .zip(&self.target.weights)
            .map(|(a, b)| b - a)
            .collect()
    }

    /// Measure at parameter t. The endpoints return bitwise copies of the
    /// stored measures; interior parameters evaluate w_j = fma(t, d_j, a_j),
    /// one rounding per weight.
    pub fn measure_at(&self, t: f64) -> Result<SpectralMeasure> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("path parameter t = {t}")));
        }
        if t == 0.0 {
            return Ok(self.base.clone());
        }
        if t == 1.0 {
            return Ok(self.target.clone());
        }
        let weights: Vec<f64> = self
            .base
            .weights
            .iter()
            .zip(&self.target.weights)
            .map(|(&a, &b)| f64::mul_add(t, b - a, a))
            .collect();
        for (index, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonpositiveWeight { index, value: w });
            }
        }
        SpectralMeasure::new(
            self.base.energies.clone(),
            weights,
            self.base.provenance.clone(),
        )
    }

    /// Total weight movement, sum of |target - base|.
    pub fn l1_delta(&self) -> f64 {
        self.deltas().iter().map(|d| d.abs()).sum()
    }
}

/// Path between two measures sharing a spectrum within `tol`. Free-function
/// spelling of [`IsospectralPath::new`].
pub fn make_path(base: SpectralMeasure, target: SpectralMeasure, tol: f64) -> Result<IsospectralPath> {
    IsospectralPath::new(base, target, tol)
}
