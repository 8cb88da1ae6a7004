//! Potentials sampled on a uniform grid over [0, L].
//!
//! Between nodes the potential is evaluated by local cubic (four-point
//! Lagrange) interpolation, which is exact for polynomials up to degree three
//! and keeps the O(h^4) accuracy of the integrators that consume it.

use crate::error::{Error, Result};

/// Dirichlet conditions at both ends of [0, L]. The left condition is the
/// physical boundary; the right one truncates the half line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundarySpec;

impl std::fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "u(0) = 0, u(L) = 0")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPotential {
    length: f64,
    samples: Vec<f64>,
    label: String,
}

impl GridPotential {
    /// `samples` holds the n+1 node values V(x_i), x_i = i * L / n.
    pub fn new(length: f64, samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "interval length must be positive and finite, got {length}"
            )));
        }
        if samples.len() < 3 {
            return Err(Error::InvalidPotential(format!(
                "need at least 3 samples (n >= 2), got {}",
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(format!(
                "samples must be finite, found {bad}"
            )));
        }
        Ok(Self {
            length,
            samples,
            label: label.into(),
        })
    }

    pub fn from_fn(
        length: f64,
        n: usize,
        label: impl Into<String>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPotential(format!("need n >= 2, got {n}")));
        }
        let h = length / n as f64;
        let samples = (0..=n).map(|i| f(i as f64 * h)).collect();
        Self::new(length, samples, label)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of grid intervals.
    pub fn n(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn h(&self) -> f64 {
        self.length / self.n() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn min_sample(&self) -> f64 {
        self.samples.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_sample(&self) -> f64 {
        self.samples
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cubic interpolation of the samples; clamps outside [0, L].
    pub fn value(&self, x: f64) -> f64 {
        let n = self.n();
        if x <= 0.0 {
            return self.samples[0];
        }
        if x >= self.length {
            return self.samples[n];
        }
        let h = self.h();
        let seg = ((x / h) as usize).min(n - 1);
        if n == 2 {
            // Only three samples: quadratic through all of them.
            let s = x / h;
            let (f0, f1, f2) = (self.samples[0], self.samples[1], self.samples[2]);
            return f0 * (s - 1.0) * (s - 2.0) / 2.0 - f1 * s * (s - 2.0)
                + f2 * s * (s - 1.0) / 2.0;
        }
        // Four-point window centered on the segment, shifted at the ends.
        let j0 = seg.saturating_sub(1).min(n - 3);
        let s = x / h - j0 as f64;
        let f = &self.samples[j0..j0 + 4];
        let l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        let l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        let l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        let l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        f[0] * l0 + f[1] * l1 + f[2] * l2 + f[3] * l3
    }
}
