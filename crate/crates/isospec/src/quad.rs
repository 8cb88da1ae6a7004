//! Quadrature on uniform grids plus an adaptive rule for improper integrals.

use crate::error::{Error, Result};

/// Composite Simpson over all samples. For an odd interval count the final
/// three intervals use the Simpson 3/8 rule, keeping the composite O(h^4).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 2, "simpson needs at least 3 samples");
    let mut total = 0.0;
    let even_part = if n % 2 == 0 { n } else { n - 3 };
    let mut i = 0;
    while i + 2 <= even_part {
        total += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        i += 2;
    }
    if n % 2 != 0 {
        let f = &values[n - 3..=n];
        total += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    }
    total
}

/// Cumulative integral at every node, I(x_i) = int_0^{x_i}. Even nodes carry
/// plain composite Simpson; odd nodes add a cubic half-panel so the whole
/// prefix stays O(h^4). Needs at least 4 samples.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    assert!(n >= 3, "cumulative_simpson needs at least 4 samples");
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        let panel = if i % 2 == 0 {
            // Close the Simpson pair over [x_{i-2}, x_i] relative to out[i-2].
            out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
            continue;
        } else if i == 1 {
            h / 24.0 * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3])
        } else if i == n {
            h / 24.0
                * (values[n - 3] - 5.0 * values[n - 2] + 19.0 * values[n - 1] + 9.0 * values[n])
        } else {
            h / 24.0
                * (-values[i - 2] + 13.0 * values[i - 1] + 13.0 * values[i] - values[i + 1])
        };
        out[i] = out[i - 1] + panel;
    }
    out
}

/// Richardson-style estimate of the composite Simpson error: compare the full
/// grid against the half-resolution grid on the shared nodes.
pub fn simpson_error_estimate(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    if n < 4 || n % 2 != 0 {
        return f64::NAN;
    }
    let fine = simpson(values, h);
    let coarse: Vec<f64> = values.iter().step_by(2).cloned().collect();
    if coarse.len() < 3 {
        return f64::NAN;
    }
    (fine - simpson(&coarse, 2.0 * h)).abs() / 15.0
}

/// Trapezoid rule over the first `count` intervals.
pub fn trapezoid_prefix(values: &[f64], h: f64, count: usize) -> f64 {
    let count = count.min(values.len() - 1);
    let mut total = 0.0;
    for i in 0..count {
        total += 0.5 * h * (values[i] + values[i + 1]);
    }
    total
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature depth".into(),
                steps: 0,
            });
        }
        let half = 0.5 * tol;
        Ok(recurse(f, a, lm, m, fa, flm, fm, left, half, depth - 1)?
            + recurse(f, m, rm, b, fm, frm, fb, right, half, depth - 1)?)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, m, b, fa, fm, fb, whole, tol, 60)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let f = |x: f64| x * x * x - x + 2.0;
        for n in [6usize, 7, 20, 21] {
            let h = 2.0 / n as f64;
            let values: Vec<f64> = (0..=n).map(|i| f(i as f64 * h)).collect();
            let exact = 2.0f64.powi(4) / 4.0 - 2.0 + 4.0;
            assert!((simpson(&values, h) - exact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn cumulative_simpson_tracks_antiderivative() {
        let n = 81;
        let h: f64 = 3.0 / n as f64;
        let values: Vec<f64> = (0..=n).map(|i| (i as f64 * h).cos()).collect();
        let cum = cumulative_simpson(&values, h);
        for (i, c) in cum.iter().enumerate() {
            let exact = (i as f64 * h).sin();
            assert!((c - exact).abs() < 1e-7, "node {i}");
        }
    }

    #[test]
    fn cumulative_prefix_is_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 / n as f64;
            let values: Vec<f64> = (0..=n).map(|i| (3.0 * i as f64 * h).exp()).collect();
            let cum = cumulative_simpson(&values, h);
            (0..=n)
                .map(|i| (cum[i] - ((3.0 * i as f64 * h).exp() - 1.0) / 3.0).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(40) / err(80);
        assert!((10.0..24.0).contains(&ratio), "observed ratio {ratio}");
    }

    #[test]
    fn cumulative_final_matches_composite_on_even_grids() {
        let n = 60;
        let h = 1.0 / n as f64;
        let values: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(2).sin()).collect();
        let cum = cumulative_simpson(&values, h);
        assert_eq!(*cum.last().unwrap(), simpson(&values, h));
    }

    #[test]
    fn adaptive_simpson_handles_oscillation() {
        // int_0^10 sin(20 x) dx = (1 - cos(200)) / 20.
        let got = adaptive_simpson(&|x: f64| (20.0 * x).sin(), 0.0, 10.0, 1e-13).unwrap();
        let exact = (1.0 - (200.0f64).cos()) / 20.0;
        assert!((got - exact).abs() < 1e-11);
    }
}
