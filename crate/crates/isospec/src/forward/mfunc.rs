//! Weyl m-function: direct Riccati integration and evaluation from a
//! discrete spectral measure.

use crate::error::{Error, Result};
use crate::grid::GridPotential;
use crate::measure::SpectralMeasure;
use crate::ode;
use num_complex::Complex64;

/// Riccati integration refuses z closer to the real axis than this; the
/// decaying initialization loses its damping there.
pub const NEAR_AXIS_THRESHOLD: f64 = 1e-8;

/// Square root with the branch Im >= 0 (spectral convention: cuts along the
/// positive real axis resolve from above).
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

/// m-function of the zero potential on the half line.
pub fn free_m(z: Complex64) -> Complex64 {
    Complex64::new(0.0, 1.0) * sqrt_upper(z)
}

/// Reference spectral density of the zero potential, sqrt(E) / pi on E > 0.
pub fn free_measure_density(e: f64) -> f64 {
    if e > 0.0 {
        e.sqrt() / std::f64::consts::PI
    } else {
        0.0
    }
}

/// m(z) by integrating the Riccati equation w' = (V - z) - w^2 from L down
/// to 0, started on the decaying branch for the local potential value. The
/// start-up error contracts like the square of the barrier suppression on
/// the way in, so for measures computed on an adequate interval it is far
/// below the integration tolerance.
pub fn weyl_m_ode(pot: &GridPotential, z: Complex64, ode_tol: f64) -> Result<Complex64> {
    if z.im.abs() < NEAR_AXIS_THRESHOLD {
        return Err(Error::NearRealAxis { z, threshold: NEAR_AXIS_THRESHOLD });
    }
    if z.im < 0.0 {
        // Herglotz symmetry: m(conj z) = conj m(z).
        return Ok(weyl_m_ode(pot, z.conj(), ode_tol)?.conj());
    }
    let w0 = Complex64::new(0.0, 1.0) * sqrt_upper(z - pot.value(pot.length()));
    let rhs = |x: f64, y: &[f64; 2]| {
        let w = Complex64::new(y[0], y[1]);
        let dw = Complex64::new(pot.value(x) - z.re, -z.im) - w * w;
        [dw.re, dw.im]
    };
    let w = ode::integrate(&rhs, pot.length(), 0.0, [w0.re, w0.im], ode_tol)?;
    Ok(Complex64::new(w[0], w[1]))
}

fn herglotz_sum(measure: &SpectralMeasure, z: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (index, (e, a)) in measure.iter().enumerate() {
        let d = Complex64::new(e, 0.0) - z;
        if d.re == 0.0 && d.im == 0.0 {
            return Err(Error::PoleAtEigenvalue { index, energy: e });
        }
        sum += a * (d.inv() - Complex64::new(e / (1.0 + e * e), 0.0));
    }
    Ok(sum)
}

/// Herglotz constant fitted so the measure route agrees with the Riccati
/// route at one anchor point. The imaginary part of the discrepancy has no
/// constant to absorb it and is reported as a residual; it measures how much
/// of m lives outside the truncated measure.
#[derive(Debug, Clone, Copy)]
pub struct MFunctionFit {
    pub c: f64,
    pub anchor: Complex64,
    pub imag_residual: f64,
}

impl MFunctionFit {
    /// A fit with a known constant and no anchor data, for measures whose
    /// constant is dictated by construction rather than fitted.
    pub fn with_constant(c: f64) -> Self {
        MFunctionFit { c, anchor: Complex64::new(0.0, 0.0), imag_residual: 0.0 }
    }
}

/// m(z) from a discrete measure: fit.c + sum of a_j (1/(E_j - z) - E_j/(1+E_j^2)).
/// The summation order is fixed (ascending j) so equal inputs give bitwise
/// equal outputs. An empty measure yields the constant alone.
pub fn m_from_measure(measure: &SpectralMeasure, fit: &MFunctionFit, z: Complex64) -> Result<Complex64> {
    Ok(Complex64::new(fit.c, 0.0) + herglotz_sum(measure, z)?)
}

pub fn fit_m_constant(
    pot: &GridPotential,
    measure: &SpectralMeasure,
    anchor: Complex64,
    ode_tol: f64,
) -> Result<MFunctionFit> {
    let direct = weyl_m_ode(pot, anchor, ode_tol)?;
    let series = herglotz_sum(measure, anchor)?;
    let gap = direct - series;
    Ok(MFunctionFit { c: gap.re, anchor, imag_residual: gap.im.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Provenance;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn branch_stays_in_upper_half_plane() {
        assert_eq!(sqrt_upper(Complex64::new(-4.0, 0.0)), Complex64::new(0.0, 2.0));
        assert_eq!(sqrt_upper(Complex64::new(4.0, 0.0)), Complex64::new(2.0, 0.0));
        let r = sqrt_upper(Complex64::new(0.0, 1.0));
        assert!((r.re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((r.im - FRAC_1_SQRT_2).abs() < 1e-15);
        let below = sqrt_upper(Complex64::new(1.0, -1e-12));
        assert!(below.im >= 0.0);
    }

    #[test]
    fn riccati_reproduces_free_m() {
        let pot = GridPotential::from_fn(PI, 400, "zero", |_| 0.0).unwrap();
        let z = Complex64::new(0.0, 1.0);
        let m = weyl_m_ode(&pot, z, 1e-12).unwrap();
        let exact = Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!((m - exact).norm() < 1e-9, "{m}");

        let mirrored = weyl_m_ode(&pot, z.conj(), 1e-12).unwrap();
        assert!((mirrored - exact.conj()).norm() < 1e-9);
    }

    #[test]
    fn riccati_shifts_with_the_potential() {
        // m_{V+c}(z) = m_V(z - c) for constant c.
        let pot5 = GridPotential::from_fn(PI, 400, "five", |_| 5.0).unwrap();
        let z = Complex64::new(2.0, 1.5);
        let m = weyl_m_ode(&pot5, z, 1e-12).unwrap();
        let exact = free_m(z - 5.0);
        assert!((m - exact).norm() < 1e-9, "{m} vs {exact}");
    }

    #[test]
    fn near_axis_is_refused() {
        let pot = GridPotential::from_fn(PI, 100, "zero", |_| 0.0).unwrap();
        assert!(matches!(
            weyl_m_ode(&pot, Complex64::new(1.0, 1e-9), 1e-10),
            Err(Error::NearRealAxis { .. })
        ));
    }

    fn tiny_measure() -> SpectralMeasure {
        SpectralMeasure::new(
            vec![1.0],
            vec![1.0],
            Provenance {
                source_label: "unit".into(),
                length: 1.0,
                n: 2,
                j_count: 1,
                eigen_tol: 0.0,
                quad_tol: 0.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn measure_route_worked_example() {
        // One unit atom at E = 1, c = 0, z = i:
        // 1/(1 - i) - 1/2 = (1 + i)/2 - 1/2 = i/2.
        let fit = MFunctionFit::with_constant(0.0);
        let m = m_from_measure(&tiny_measure(), &fit, Complex64::new(0.0, 1.0)).unwrap();
        assert!((m - Complex64::new(0.0, 0.5)).norm() < 1e-15, "{m}");
    }

    #[test]
    fn measure_route_handles_poles_and_empty_measures() {
        assert!(matches!(
            m_from_measure(&tiny_measure(), &MFunctionFit::with_constant(0.0), Complex64::new(1.0, 0.0)),
            Err(Error::PoleAtEigenvalue { index: 0, .. })
        ));
        let empty = SpectralMeasure::new(vec![], vec![], tiny_measure().provenance.clone()).unwrap();
        let m = m_from_measure(&empty, &MFunctionFit::with_constant(0.25), Complex64::new(0.0, 2.0)).unwrap();
        assert_eq!(m, Complex64::new(0.25, 0.0));
    }

    #[test]
    fn free_density_worked_example() {
        assert!((free_measure_density(4.0) - 2.0 / PI).abs() < 1e-15);
        assert_eq!(free_measure_density(-1.0), 0.0);
    }
}
