//! Finite-difference differentiation of uniformly sampled data.
//!
//! Stencil weights come from Fornberg's recursion rather than hardcoded
//! tables, so interior and one-sided variants share one code path.

/// Weights for the m-th derivative at `x0` given stencil nodes `grid`.
/// Standard Fornberg recursion; exact for polynomials up to the stencil size.
pub fn fornberg_weights(x0: f64, grid: &[f64], m: usize) -> Vec<f64> {
    let n = grid.len();
    assert!(n > m, "stencil too short for derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = grid[0] - x0;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = grid[i] - x0;
        // Row i is built from row i-1 as it stood before this sweep.
        let prev = c[i - 1].clone();
        for j in 0..i {
            let c3 = grid[i] - grid[j];
            c2 *= c3;
            for k in (1..=m.min(i)).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        for k in (1..=m.min(i)).rev() {
            c[i][k] = c1 / c2 * (k as f64 * prev[k - 1] - c5 * prev[k]);
        }
        c[i][0] = -c1 * c5 * prev[0] / c2;
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Interior nodes use the centered `width`-point stencil; nodes too close to
/// either end use a one-sided `edge_width`-point stencil, widened where needed
/// so the boundary rows keep the interior order of accuracy.
fn apply_stencils(values: &[f64], h: f64, width: usize, edge_width: usize, m: usize) -> Vec<f64> {
    let n = values.len();
    assert!(width % 2 == 1 && edge_width >= width, "stencil configuration");
    assert!(n >= edge_width, "need at least {edge_width} samples");
    let half = width / 2;
    let center_grid: Vec<f64> = (0..width).map(|i| i as f64).collect();
    let edge_grid: Vec<f64> = (0..edge_width).map(|i| i as f64).collect();
    let centered = fornberg_weights(half as f64, &center_grid, m);
    let scale = h.powi(m as i32).recip();
    let dot = |window: &[f64], weights: &[f64]| -> f64 {
        scale * window.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>()
    };
    (0..n)
        .map(|i| {
            if i < half {
                dot(&values[..edge_width], &fornberg_weights(i as f64, &edge_grid, m))
            } else if i + half >= n {
                let at = (i + edge_width - n) as f64;
                dot(&values[n - edge_width..], &fornberg_weights(at, &edge_grid, m))
            } else {
                dot(&values[i - half..i - half + width], &centered)
            }
        })
        .collect()
}

/// First derivative, 5-point stencils, O(h^4) including the boundary rows.
pub fn derivative_5point(values: &[f64], h: f64) -> Vec<f64> {
    apply_stencils(values, h, 5, 5, 1)
}

/// Second derivative, 5-point interior stencil. The one-sided rows take a
/// sixth node to stay O(h^4).
pub fn second_derivative_5point(values: &[f64], h: f64) -> Vec<f64> {
    apply_stencils(values, h, 5, 6, 2)
}

/// First derivative, 7-point stencils, O(h^6).
pub fn derivative_7point(values: &[f64], h: f64) -> Vec<f64> {
    apply_stencils(values, h, 7, 7, 1)
}
