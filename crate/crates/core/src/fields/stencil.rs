//! Order-4 finite difference stencils on a uniform axis.

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f⁽ᵏ⁾(z) ≈ Σⱼ w[k][j] f(nodes[j])` for every `k <= max_order`.
pub fn fd_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Width of the centered order-4 stencil for an `m`-th derivative.
const fn centered_width(m: usize) -> usize {
    match m {
        0 => 1,
        1 | 2 => 5,
        _ => 7,
    }
}

/// Stencil for the `m`-th derivative at coordinate `u` on the axis
/// `origin + k·h, k = 0..n`. Returns the first node index and the weights.
///
/// On a node with room for it, the centered order-4 stencil is used;
/// otherwise a window of `m + 4` consecutive nodes, clamped to the axis,
/// which is order 4 for any evaluation point.
pub(crate) fn axis_weights(origin: f64, h: f64, n: usize, u: f64, m: usize) -> (usize, Vec<f64>) {
    let t = (u - origin) / h;
    let nearest = t.round();
    let on_node = (t - nearest).abs() < 1e-9 && nearest >= 0.0 && nearest <= (n - 1) as f64;
    if on_node {
        let k = nearest as usize;
        let w = centered_width(m);
        let r = w / 2;
        if k >= r && k + r < n {
            let offsets: Vec<f64> = (0..w).map(|j| j as f64 - r as f64).collect();
            let wts = fd_weights(0.0, &offsets, m);
            let scale = h.powi(m as i32);
            return (k - r, wts[m].iter().map(|v| v / scale).collect());
        }
    }
    let w = (m + 4).min(n);
    let start = (t.floor() as i64 - (w as i64 - 1) / 2).clamp(0, (n - w) as i64) as usize;
    let offsets: Vec<f64> = (0..w).map(|j| (start + j) as f64).collect();
    let wts = fd_weights(t, &offsets, m);
    let scale = h.powi(m as i32);
    (start, wts[m].iter().map(|v| v / scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_centered_weights() {
        let w = fd_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn one_sided_window_is_exact_on_low_degree_polynomials() {
        // m + 4 nodes reproduce derivatives of polynomials of degree m + 3.
        for m in 0..=4 {
            let (start, w) = axis_weights(0.0, 0.1, 12, 0.03, m);
            let deg = m + 3;
            let f = |x: f64| (0..=deg).map(|k| x.powi(k as i32)).sum::<f64>();
            let approx: f64 = w.iter().enumerate().map(|(j, wj)| wj * f((start + j) as f64 * 0.1)).sum();
            let exact: f64 = (m..=deg)
                .map(|k| {
                    let fall: f64 = (0..m).map(|i| (k - i) as f64).product();
                    fall * 0.03f64.powi((k - m) as i32)
                })
                .sum();
            assert!((approx - exact).abs() < 1e-7 * (1.0 + exact.abs()), "m={m}: {approx} vs {exact}");
        }
    }
}
