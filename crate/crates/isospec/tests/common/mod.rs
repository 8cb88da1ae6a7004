//! Shared fixtures for the integration tests: an independent finite-difference
//! eigensolver used as a cross-check oracle, plus small helpers.
//!
//! The oracle deliberately shares no code with the library solver. It
//! discretizes -u'' + V u with the three-point Laplacian, locates eigenvalues
//! by Sturm bisection on the tridiagonal matrix, recovers eigenvectors by
//! inverse iteration, and removes the O(h^2) error by Richardson pairing.

#![allow(dead_code)]

/// Tridiagonal LU with partial pivoting (constant symmetric off-diagonal).
/// Returns factors packed for `solve`.
struct TridiagLu {
    n: usize,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    fill: Vec<f64>,
    swapped: Vec<bool>,
    pivot_floor: f64,
}

impl TridiagLu {
    fn factor(diag_in: &[f64], off: f64) -> Self {
        let n = diag_in.len();
        let scale = diag_in.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * off.abs();
        // Shifts sit on eigenvalues here, so the trailing pivot can underflow;
        // a scaled floor keeps inverse iteration finite.
        let pivot_floor = 1e-14 * scale.max(1.0);
        let guard = |p: f64| {
            if p.abs() < pivot_floor {
                pivot_floor.copysign(if p == 0.0 { 1.0 } else { p })
            } else {
                p
            }
        };
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut diag = diag_in.to_vec();
        let mut upper = vec![off; n.saturating_sub(1)];
        let mut fill = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        // Eliminations never touch rows below i+1, so the subdiagonal entry
        // consumed at step i is always the original `off`.
        for i in 0..n - 1 {
            if diag[i].abs() >= off.abs() {
                let l = off / guard(diag[i]);
                lower[i] = l;
                diag[i + 1] -= l * upper[i];
                // fill[i] stays zero.
            } else {
                // Swap rows i and i+1; the swapped-in row reaches column i+2.
                swapped[i] = true;
                let l = diag[i] / off;
                lower[i] = l;
                let old_next_diag = diag[i + 1];
                diag[i] = off;
                diag[i + 1] = upper[i] - l * old_next_diag;
                upper[i] = old_next_diag;
                if i + 2 < n {
                    fill[i] = upper[i + 1];
                    upper[i + 1] = -l * upper[i + 1];
                }
            }
        }
        TridiagLu { n, lower, diag, upper, fill, swapped, pivot_floor }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = self.n;
        for i in 0..n - 1 {
            if self.swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= self.lower[i] * rhs[i];
        }
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= self.upper[i] * rhs[i + 1];
            }
            if i + 2 < n {
                v -= self.fill[i] * rhs[i + 2];
            }
            let d = self.diag[i];
            let pivot = if d.abs() < self.pivot_floor {
                self.pivot_floor.copysign(if d == 0.0 { 1.0 } else { d })
            } else {
                d
            };
            rhs[i] = v / pivot;
        }
    }
}

/// Number of eigenvalues of the discretized operator strictly below `lambda`,
/// by counting negative pivots of the shifted LDL^T recursion.
fn sturm_count(diag: &[f64], off: f64, lambda: f64) -> usize {
    let mut count = 0;
    // No coupling term enters the first pivot.
    let mut q = f64::INFINITY;
    let off2 = off * off;
    for &d in diag {
        let prev = if q != 0.0 { q } else { f64::MIN_POSITIVE };
        q = d - lambda - off2 / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenpairs of the three-point discretization on [0, L] with
/// zero boundary values, `n` interior nodes. Returns (energies, weights)
/// where weights[j] = u'(0)^2 / ||u||^2 for the j-th eigenvector.
fn fd_eigen_once(f: &dyn Fn(f64) -> f64, length: f64, n: usize, count: usize) -> (Vec<f64>, Vec<f64>) {
    let h = length / (n + 1) as f64;
    let diag: Vec<f64> = (1..=n)
        .map(|i| 2.0 / (h * h) + f(i as f64 * h))
        .collect();
    let off = -1.0 / (h * h);
    let vmin = (1..=n).map(|i| f(i as f64 * h)).fold(f64::INFINITY, f64::min);
    let mut energies = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut lo_base = vmin - 1.0;
    for j in 1..=count {
        let mut lo = lo_base;
        let mut hi = lo + 1.0;
        while sturm_count(&diag, off, hi) < j {
            let span = hi - lo;
            lo = hi;
            hi += 2.0 * span;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo < 1e-13 * (1.0 + mid.abs()) {
                break;
            }
            if sturm_count(&diag, off, mid) < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let e = 0.5 * (lo + hi);
        energies.push(e);
        lo_base = e;

        // Inverse iteration at the converged shift.
        let shifted: Vec<f64> = diag.iter().map(|d| d - e).collect();
        let lu = TridiagLu::factor(&shifted, off);
        let mut u: Vec<f64> = (1..=n)
            .map(|i| (j as f64 * std::f64::consts::PI * i as f64 * h / length).sin())
            .collect();
        for _ in 0..3 {
            lu.solve(&mut u);
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            u.iter_mut().for_each(|v| *v /= norm);
        }
        // Zero boundary values make the rectangle rule the natural norm here.
        let norm2 = h * u.iter().map(|v| v * v).sum::<f64>();
        let slope = u[0] / h;
        weights.push(slope * slope / norm2);
    }
    (energies, weights)
}

/// Richardson-paired oracle: runs `n` and `2n + 1` interior nodes (same h
/// halving) and extrapolates the leading h^2 error away.
pub fn fd_oracle(
    f: &dyn Fn(f64) -> f64,
    length: f64,
    n: usize,
    count: usize,
) -> (Vec<f64>, Vec<f64>) {
    let (e1, a1) = fd_eigen_once(f, length, n, count);
    let (e2, a2) = fd_eigen_once(f, length, 2 * n + 1, count);
    let extrap = |coarse: &[f64], fine: &[f64]| {
        coarse
            .iter()
            .zip(fine)
            .map(|(c, f)| (4.0 * f - c) / 3.0)
            .collect::<Vec<f64>>()
    };
    (extrap(&e1, &e2), extrap(&a1, &a2))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-300))
        .fold(0.0, f64::max)
}

/// Composite quadrature weights of fourth order on M uniform panels:
/// Simpson where the panel count is even, with a 3/8 block absorbing an odd
/// remainder, and a lone trapezoid panel as the unavoidable M = 1 case.
pub fn quartic_weights(panels: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; panels + 1];
    match panels {
        0 => {}
        1 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
        }
        p if p % 2 == 0 => {
            w[0] = h / 3.0;
            w[p] = h / 3.0;
            for (k, slot) in w.iter_mut().enumerate().take(p).skip(1) {
                *slot = if k % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
            }
        }
        p => {
            // Simpson up to p - 3, then the 3/8 rule on the last three panels.
            let cut = p - 3;
            if cut > 0 {
                let head = quartic_weights(cut, h);
                for (slot, &v) in w.iter_mut().zip(&head) {
                    *slot += v;
                }
            }
            for (k, &c) in [0.375, 1.125, 1.125, 0.375].iter().enumerate() {
                w[cut + k] += c * h;
            }
        }
    }
    w
}

/// Deformed potential on a uniform mesh by direct dense collocation of the
/// deformation integral equation: for each mesh point x, solve
/// K(x, y) + F(x, y) + integral over [0, x] of K(x, s) F(s, y) ds = 0 at the
/// mesh nodes y <= x, where F(s, y) = sum_j deltas[j] phi_j(s) phi_j(y),
/// then read off V(x) = v0(x) + 2 d/dx K(x, x).
///
/// Nothing here knows about determinants or rank: the equation is solved as
/// a generic Fredholm system with fourth-order quadrature weights, so it
/// cross-checks the production route through entirely different arithmetic.
pub fn nystrom_gl_potential(v0: &[f64], phis: &[Vec<f64>], deltas: &[f64], h: f64) -> Vec<f64> {
    use nalgebra::{DMatrix, DVector};
    let len = v0.len();
    assert!(len >= 5, "mesh too short to differentiate");
    assert!(phis.iter().all(|p| p.len() == len));
    assert_eq!(phis.len(), deltas.len());
    let f_entry = |k: usize, m: usize| -> f64 {
        phis.iter().zip(deltas).map(|(phi, &d)| d * phi[k] * phi[m]).sum()
    };
    let mut kdiag = vec![0.0; len];
    kdiag[0] = -f_entry(0, 0);
    for i in 1..len {
        let w = quartic_weights(i, h);
        let a = DMatrix::from_fn(i + 1, i + 1, |k, m| {
            let kron = if k == m { 1.0 } else { 0.0 };
            kron + w[m] * f_entry(m, k)
        });
        let rhs = DVector::from_fn(i + 1, |k, _| -f_entry(i, k));
        let solved = a.lu().solve(&rhs).expect("collocation system is singular");
        kdiag[i] = solved[i];
    }
    let dk = isospec::diff::derivative_5point(&kdiag, h);
    v0.iter().zip(&dk).map(|(&v, &d)| v + 2.0 * d).collect()
}
