//! Truncated bivariate Taylor series.
//!
//! A [`Jet`] stores the Taylor coefficients `c[a,b] = ∂ₓᵃ∂ᵧᵇ f(p) / (a! b!)`
//! of a function about a base point, for every multi-index with
//! `a + b <= deg`. Arithmetic on jets is exact truncated series arithmetic,
//! so evaluating a closed-form expression on coordinate jets yields exact
//! partial derivatives (up to rounding) without symbolic algebra.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Highest total degree a jet can carry.
pub const MAX_DEG: usize = 6;
const LEN: usize = (MAX_DEG + 1) * (MAX_DEG + 2) / 2;

#[inline]
pub(crate) const fn idx(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Number of coefficients of total degree `<= deg`.
#[inline]
const fn count(deg: usize) -> usize {
    (deg + 1) * (deg + 2) / 2
}

const FACT: [f64; MAX_DEG + 1] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
    deg: usize,
}

impl Jet {
    pub fn constant(v: f64, deg: usize) -> Self {
        assert!(deg <= MAX_DEG, "jet degree {deg} exceeds {MAX_DEG}");
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c, deg }
    }

    /// The coordinate functions `x` and `y` expanded about `(x0, y0)`.
    pub fn vars(x0: f64, y0: f64, deg: usize) -> (Jet, Jet) {
        let mut x = Jet::constant(x0, deg);
        let mut y = Jet::constant(y0, deg);
        if deg >= 1 {
            x.c[idx(1, 0)] = 1.0;
            y.c[idx(0, 1)] = 1.0;
        }
        (x, y)
    }

    /// Builds a jet from partial derivatives `partials(a, b) = ∂ₓᵃ∂ᵧᵇ f`.
    pub fn from_partials(deg: usize, mut partials: impl FnMut(usize, usize) -> f64) -> Self {
        let mut j = Jet::constant(0.0, deg);
        for d in 0..=deg {
            for b in 0..=d {
                let a = d - b;
                j.c[idx(a, b)] = partials(a, b) / (FACT[a] * FACT[b]);
            }
        }
        j
    }

    #[inline]
    pub fn deg(&self) -> usize {
        self.deg
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of `dxᵃ dyᵇ`.
    #[inline]
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        assert!(a + b <= self.deg, "coefficient ({a},{b}) beyond degree {}", self.deg);
        self.c[idx(a, b)]
    }

    /// The partial derivative `∂ₓᵃ∂ᵧᵇ` at the base point.
    #[inline]
    pub fn partial(&self, a: usize, b: usize) -> f64 {
        self.coeff(a, b) * FACT[a] * FACT[b]
    }

    /// Drops every coefficient above `deg`.
    pub fn truncate(mut self, deg: usize) -> Self {
        if deg >= self.deg {
            return self;
        }
        for k in count(deg)..LEN {
            self.c[k] = 0.0;
        }
        self.deg = deg;
        self
    }

    /// `∂ₓ` of the series; the result has one degree less.
    pub fn dx(&self) -> Jet {
        assert!(self.deg >= 1, "cannot differentiate a degree-0 jet");
        let deg = self.deg - 1;
        let mut out = Jet::constant(0.0, deg);
        for d in 0..=deg {
            for b in 0..=d {
                let a = d - b;
                out.c[idx(a, b)] = (a + 1) as f64 * self.c[idx(a + 1, b)];
            }
        }
        out
    }

    /// `∂ᵧ` of the series; the result has one degree less.
    pub fn dy(&self) -> Jet {
        assert!(self.deg >= 1, "cannot differentiate a degree-0 jet");
        let deg = self.deg - 1;
        let mut out = Jet::constant(0.0, deg);
        for d in 0..=deg {
            for b in 0..=d {
                let a = d - b;
                out.c[idx(a, b)] = (b + 1) as f64 * self.c[idx(a, b + 1)];
            }
        }
        out
    }

    /// Partial along axis 0 (`x`) or 1 (`y`).
    pub fn d(&self, axis: usize) -> Jet {
        match axis {
            0 => self.dx(),
            1 => self.dy(),
            _ => panic!("axis {axis} out of range"),
        }
    }

    /// Applies a univariate function given its derivatives `f⁽ᵏ⁾(u₀)` for
    /// `k = 0..=deg`.
    pub fn compose(&self, derivs: &[f64]) -> Jet {
        debug_assert!(derivs.len() > self.deg);
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut out = Jet::constant(derivs[0], self.deg);
        let mut power = Jet::constant(1.0, self.deg);
        for (k, dk) in derivs.iter().enumerate().take(self.deg + 1).skip(1) {
            power *= delta;
            let s = dk / FACT[k];
            for i in 0..count(self.deg) {
                out.c[i] += s * power.c[i];
            }
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&[e; MAX_DEG + 1])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.deg).map(|k| cyc[k % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cyc = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.deg).map(|k| cyc[k % 4]).collect();
        self.compose(&d)
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let d: Vec<f64> = (0..=self.deg).map(|k| if k % 2 == 0 { s } else { c }).collect();
        self.compose(&d)
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        let d: Vec<f64> = (0..=self.deg).map(|k| if k % 2 == 0 { c } else { s }).collect();
        self.compose(&d)
    }

    pub fn ln(&self) -> Jet {
        let u = self.value();
        let mut d = vec![u.ln()];
        for k in 1..=self.deg {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign * FACT[k - 1] / u.powi(k as i32));
        }
        self.compose(&d)
    }

    /// Real power `u^r`; the base value must be positive unless `r` is a
    /// nonnegative integer.
    pub fn powf(&self, r: f64) -> Jet {
        let u = self.value();
        let mut d = Vec::with_capacity(self.deg + 1);
        let mut falling = 1.0;
        for k in 0..=self.deg {
            d.push(falling * u.powf(r - k as f64));
            falling *= r - k as f64;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Jet {
        let u = self.value();
        let mut d = Vec::with_capacity(self.deg + 1);
        let mut acc = 1.0 / u;
        for k in 0..=self.deg {
            d.push(acc);
            acc *= -((k + 1) as f64) / u;
        }
        self.compose(&d)
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut out = Jet::constant(1.0, self.deg);
        for _ in 0..n {
            out *= *self;
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        let deg = self.deg.min(rhs.deg);
        *self = self.truncate(deg);
        for i in 0..count(deg) {
            self.c[i] += rhs.c[i];
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        let deg = self.deg.min(rhs.deg);
        *self = self.truncate(deg);
        for i in 0..count(deg) {
            self.c[i] -= rhs.c[i];
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let deg = self.deg.min(rhs.deg);
        let mut out = Jet::constant(0.0, deg);
        for d1 in 0..=deg {
            for b1 in 0..=d1 {
                let l = self.c[idx(d1 - b1, b1)];
                if l == 0.0 {
                    continue;
                }
                for d2 in 0..=(deg - d1) {
                    for b2 in 0..=d2 {
                        out.c[idx(d1 - b1 + d2 - b2, b1 + b2)] += l * rhs.c[idx(d2 - b2, b2)];
                    }
                }
            }
        }
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for v in self.c.iter_mut() {
            *v *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn polynomial_partials() {
        let (x, y) = Jet::vars(1.0, 2.0, 4);
        // f = x^3 y^2
        let f = x.powi(3) * y.powi(2);
        assert!(close(f.value(), 4.0, 1e-15));
        assert!(close(f.partial(1, 0), 12.0, 1e-15));
        assert!(close(f.partial(2, 1), 6.0 * 2.0 * 2.0, 1e-15));
        assert!(close(f.partial(3, 1), 6.0 * 4.0, 1e-15));
        assert!(close(f.partial(0, 2), 2.0, 1e-15));
    }

    #[test]
    fn transcendental_partials_match_closed_forms() {
        let (x, y) = Jet::vars(0.3, -0.7, 6);
        let f = x.sin() * y.cos();
        // ∂x^3 ∂y^2 (sin x cos y) = -cos x * -cos y
        assert!(close(f.partial(3, 2), 0.3f64.cos() * (-0.7f64).cos(), 1e-13));
        let e = (x + y).exp();
        assert!(close(e.partial(2, 4), (-0.4f64).exp(), 1e-13));
        let r = (2.0 + x * y).sqrt();
        // d/dx sqrt(2+xy) = y / (2 sqrt(2+xy))
        let base = (2.0f64 + 0.3 * -0.7).sqrt();
        assert!(close(r.partial(1, 0), -0.7 / (2.0 * base), 1e-14));
        let l = (1.0 + x * x).ln();
        assert!(close(l.partial(1, 0), 0.6 / 1.09, 1e-14));
        let h = x.cosh() + x.sinh();
        assert!(close(h.partial(5, 0), 0.3f64.exp(), 1e-13));
    }

    #[test]
    fn division_inverts_multiplication() {
        let (x, y) = Jet::vars(0.2, 0.1, 6);
        let a = 1.0 + x * x + 3.0 * y;
        let b = (x - y).cos() + 2.0;
        let q = (a * b) / b;
        for d in 0..=6 {
            for j in 0..=d {
                assert!(close(q.coeff(d - j, j), a.coeff(d - j, j), 1e-13));
            }
        }
    }

    #[test]
    fn derivative_reduces_degree_and_commutes() {
        let (x, y) = Jet::vars(0.4, 0.5, 5);
        let f = (x * y).sin() * (x - 2.0 * y).exp();
        let fxy = f.dx().dy();
        let fyx = f.dy().dx();
        assert_eq!(fxy.deg(), 3);
        for d in 0..=3 {
            for j in 0..=d {
                assert!(close(fxy.coeff(d - j, j), fyx.coeff(d - j, j), 1e-14));
            }
        }
        assert!(close(fxy.value(), f.partial(1, 1), 1e-14));
    }

    #[test]
    fn degree_truncates_to_minimum() {
        let (x, _) = Jet::vars(0.0, 0.0, 4);
        let c = Jet::constant(2.0, 2);
        assert_eq!((x * c).deg(), 2);
        assert_eq!((x + c).deg(), 2);
    }
}
