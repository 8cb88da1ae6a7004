//! Chebyshev sampling and barycentric interpolation on [0, 1].

/// Chebyshev points of the second kind mapped to [0, 1], ascending, endpoints
/// included. These are the nodes used for smoothness diagnostics along paths.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    assert!(count >= 2, "need at least the two endpoints");
    let n = (count - 1) as f64;
    (0..count)
        .map(|i| 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n).cos()))
        .collect()
}

/// Barycentric evaluation on second-kind Chebyshev nodes. Weights are the
/// closed-form (-1)^i with halved endpoints; the affine map to [0, 1] leaves
/// them unchanged up to a common factor.
pub fn chebyshev_eval(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let dt = t - nodes[i];
        if dt == 0.0 {
            return values[i];
        }
        let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
        if i == 0 || i == n - 1 {
            w *= 0.5;
        }
        let q = w / dt;
        num += q * values[i];
        den += q;
    }
    num / den
}
