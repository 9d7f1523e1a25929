//! Fixed-step classical Runge–Kutta.

use crate::error::Result;

/// One RK4 step of `y' = f(x, y)`.
pub fn rk4_step<const N: usize, F>(f: &F, x: f64, y: [f64; N], h: f64) -> Result<[f64; N]>
where
    F: Fn(f64, [f64; N]) -> Result<[f64; N]>,
{
    let add = |a: [f64; N], b: [f64; N], s: f64| {
        let mut out = a;
        for i in 0..N {
            out[i] += s * b[i];
        }
        out
    };
    let k1 = f(x, y)?;
    let k2 = f(x + 0.5 * h, add(y, k1, 0.5 * h))?;
    let k3 = f(x + 0.5 * h, add(y, k2, 0.5 * h))?;
    let k4 = f(x + h, add(y, k3, h))?;
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrates from `x0` to `x1` in exactly `steps` equal steps.
pub fn rk4_integrate<const N: usize, F>(f: &F, x0: f64, y0: [f64; N], x1: f64, steps: usize) -> Result<[f64; N]>
where
    F: Fn(f64, [f64; N]) -> Result<[f64; N]>,
{
    let h = (x1 - x0) / steps.max(1) as f64;
    let mut y = y0;
    for k in 0..steps.max(1) {
        y = rk4_step(f, x0 + k as f64 * h, y, h)?;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_is_fourth_order() {
        let f = |_: f64, y: [f64; 2]| Ok([y[1], -y[0]]);
        let err = |n: usize| {
            let y = rk4_integrate(&f, 0.0, [1.0, 0.0], 1.0, n).unwrap();
            (y[0] - 1.0f64.cos()).abs()
        };
        let ratio = err(20) / err(40);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
        let back = rk4_integrate(&f, 0.0, [1.0, 0.0], -0.5, 500).unwrap();
        assert!((back[0] - 0.5f64.cos()).abs() < 1e-12);
    }
}
