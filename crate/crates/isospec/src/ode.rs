//! Adaptive Dormand-Prince 5(4) integration for the small systems used here:
//! regular solutions (2 components), Prufer phases (1), Riccati equations (2).
//!
//! Step acceptance uses a per-unit-length error scale, so the configured
//! tolerance bounds the accumulated local error over an interval of length 1
//! in both absolute terms and relative to the current solution magnitude.

use crate::error::{Error, Result};

pub const DEFAULT_ODE_TOL: f64 = 1e-11;

/// Magnitude guard: integrations abort rather than run into overflow.
pub const MAGNITUDE_LIMIT: f64 = 1e200;

const MAX_STEPS: usize = 50_000_000;

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn step<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    x: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], f64) {
    let mut k = [[0.0; N]; 7];
    k[0] = f(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(x + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..N {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let e = h * (d5 - d4);
        let scale = 1.0 + y[i].abs().max(y5[i].abs());
        err = err.max(e.abs() / scale);
    }
    (y5, err)
}

/// Integrate y' = f(x, y) from `x0` to `x1` (either direction) and return
/// y(x1). `tol` is the per-unit-length error tolerance.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> [f64; N],
    x0: f64,
    x1: f64,
    y0: [f64; N],
    tol: f64,
) -> Result<[f64; N]> {
    let mut y = y0;
    if x0 == x1 {
        return Ok(y);
    }
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut h = dir * (span / 100.0).min(0.1).max(span * 1e-12);
    for _ in 0..MAX_STEPS {
        let remaining = x1 - x;
        if remaining * dir <= 0.0 {
            return Ok(y);
        }
        let last = remaining.abs() <= h.abs();
        if last {
            h = remaining;
        }
        if x + h == x {
            // The leftover distance is below the resolution of x itself.
            return Ok(y);
        }
        let (y_new, err) = step(&mut f, x, &y, h);
        let tol_here = tol * h.abs();
        if err <= tol_here {
            y = y_new;
            for yi in &y {
                if !yi.is_finite() || yi.abs() > MAGNITUDE_LIMIT {
                    return Err(Error::Overflow {
                        limit: MAGNITUDE_LIMIT,
                    });
                }
            }
            if last {
                return Ok(y);
            }
            x += h;
        }
        let ratio = if err > 0.0 { tol_here / err } else { 1e4 };
        h *= 0.9 * ratio.powf(0.2).clamp(0.2, 5.0);
        if h.abs() < span * 1e-15 {
            return Err(Error::NoConvergence {
                what: "adaptive step size underflow".into(),
                steps: 0,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "ODE integration".into(),
        steps: MAX_STEPS,
    })
}

/// Integrate from `nodes[0]` across every node, calling `visit(i, y(x_i))`
/// for each node including the first. Nodes must be strictly monotone.
pub fn integrate_nodes<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> [f64; N],
    nodes: &[f64],
    y0: [f64; N],
    tol: f64,
    mut visit: impl FnMut(usize, &[f64; N]) -> bool,
) -> Result<()> {
    let mut y = y0;
    if !visit(0, &y) {
        return Ok(());
    }
    for i in 1..nodes.len() {
        y = integrate(&mut f, nodes[i - 1], nodes[i], y, tol)?;
        if !visit(i, &y) {
            return Ok(());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_harmonic_oscillator() {
        // y'' = -y; y(0) = 0, y'(0) = 1 => y = sin.
        let f = |_x: f64, y: &[f64; 2]| [y[1], -y[0]];
        let end = integrate(f, 0.0, std::f64::consts::PI / 2.0, [0.0, 1.0], 1e-12).unwrap();
        assert!((end[0] - 1.0).abs() < 1e-10);
        assert!(end[1].abs() < 1e-10);
    }

    #[test]
    fn integrates_backward() {
        // y' = y integrated from 1 down to 0: y(0) = y(1)/e.
        let f = |_x: f64, y: &[f64; 1]| [y[0]];
        let end = integrate(f, 1.0, 0.0, [1.0], 1e-13).unwrap();
        assert!((end[0] - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn node_sweep_matches_single_shot() {
        let f = |x: f64, y: &[f64; 1]| [x.cos() * y[0]];
        let nodes: Vec<f64> = (0..=64).map(|i| i as f64 * 3.0 / 64.0).collect();
        let mut at_end = 0.0;
        integrate_nodes(f, &nodes, [1.0], 1e-12, |i, y| {
            if i == 64 {
                at_end = y[0];
            }
            true
        })
        .unwrap();
        let direct = integrate(f, 0.0, 3.0, [1.0], 1e-12).unwrap()[0];
        assert!((at_end - direct).abs() < 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        let f = |_x: f64, y: &[f64; 1]| [30.0 * y[0]];
        let err = integrate(f, 0.0, 20.0, [1.0], 1e-9).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }
}
