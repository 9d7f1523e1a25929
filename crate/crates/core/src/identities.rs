//! Quadrature checks of the integration-by-parts identities behind the
//! Darboux equation on a square, the boundary scan of the covariant
//! Hessian, and the `2 − 3|∇_g z|²` certificate.
//!
//! With `Vⁱ = bⁱʲ∂ⱼz` and `∇ᵢbⁱʲ = −Kzʲ`, the divergence theorem gives
//!
//! `∫ 2|g|⁻¹det(∇ᵢⱼz) dω − ∫ K|∇_g z|² dω = ∮ |g|^{1/2} Vⁱ n̄ᵢ dσ`
//!
//! for every smooth `z`, with `dω = |g|^{1/2} dx dy` and the Euclidean
//! normal `n̄` and length element `dσ`. On Darboux solutions the left side
//! collapses to `∫ K(2 − 3|∇_g z|²) dω`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{integrate_boundary_with, integrate_rect_with, Point, Rect, ScalarField, Side, DEFAULT_CELLS};
use crate::geometry::{darboux_residual, Metric2, PointGeometry};

/// Samples per side for the boundary scan.
pub const SCAN_SAMPLES: usize = 512;
/// Points per axis for the smallness certificate.
pub const CERTIFICATE_SAMPLES: usize = 129;
/// Points per axis at which the Darboux gate is checked.
pub const GATE_SAMPLES: usize = 9;
/// Default largest `|darboux_residual|` for which the solution-only
/// identity is evaluated.
pub const DEFAULT_GATE_TOL: f64 = 1e-6;

/// First derivatives, covariant Hessian, `|g|`, and `|∇_g z|²` at a point.
#[derive(Clone, Copy, Debug)]
struct Local {
    dz: [f64; 2],
    hess: [[f64; 2]; 2],
    det_g: f64,
    grad_sq: f64,
}

impl Local {
    fn at(g: &Metric2, z: &ScalarField, p: Point) -> Result<Local> {
        let pg = PointGeometry::at(g, p, 1)?;
        let zj = z.jet(p, 2)?;
        let h = pg.hessian(&zj);
        Ok(Local {
            dz: [zj.partial(1, 0), zj.partial(0, 1)],
            hess: [[h[0][0].value(), h[0][1].value()], [h[1][0].value(), h[1][1].value()]],
            det_g: pg.metric.det.value(),
            grad_sq: pg.grad_norm_sq(&zj).value(),
        })
    }

    fn det_hess(&self) -> f64 {
        self.hess[0][0] * self.hess[1][1] - self.hess[0][1] * self.hess[1][0]
    }

    /// `|g|^{1/2} Vⁱ n̄ᵢ` for the Euclidean normal `n`.
    fn flux(&self, n: (f64, f64)) -> f64 {
        let [z1, z2] = self.dz;
        let h = &self.hess;
        let v1 = z1 * h[1][1] - z2 * h[0][1];
        let v2 = z2 * h[0][0] - z1 * h[0][1];
        (v1 * n.0 + v2 * n.1) / self.det_g.sqrt()
    }
}

/// `∫ K(2 − 3|∇_g z|²) dω`.
pub fn interior_integral_lhs(
    g: &Metric2,
    z: &ScalarField,
    k: &ScalarField,
    square: &Rect,
    order: usize,
) -> Result<f64> {
    integrate_rect_with(square, order, DEFAULT_CELLS, |p| {
        let l = Local::at(g, z, p)?;
        Ok(k.value(p)? * (2.0 - 3.0 * l.grad_sq) * l.det_g.sqrt())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Outward,
    Inward,
}

/// `∮ |g|^{-1/2}[(z₁∇₂₂z − z₂∇₁₂z)n̄₁ + (z₂∇₁₁z − z₁∇₁₂z)n̄₂] dσ`.
pub fn boundary_integral(
    g: &Metric2,
    z: &ScalarField,
    square: &Rect,
    order: usize,
    orientation: Orientation,
) -> Result<f64> {
    let sign = match orientation {
        Orientation::Outward => 1.0,
        Orientation::Inward => -1.0,
    };
    integrate_boundary_with(square, order, DEFAULT_CELLS, |side, p| {
        let (n1, n2) = side.normal();
        Ok(Local::at(g, z, p)?.flux((sign * n1, sign * n2)))
    })
}

pub fn boundary_integral_rhs(g: &Metric2, z: &ScalarField, square: &Rect, order: usize) -> Result<f64> {
    boundary_integral(g, z, square, order, Orientation::Outward)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityValue {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `∫ 2|g|⁻¹det(∇ᵢⱼz) dω − ∫ K|∇_g z|² dω − ∮ …`; vanishes for every
/// smooth `z`. `K` is the curvature of `g`, passed in so that callers can
/// reuse a cached field.
pub fn generalized_identity(
    g: &Metric2,
    z: &ScalarField,
    k: &ScalarField,
    square: &Rect,
    order: usize,
) -> Result<IdentityValue> {
    let lhs = integrate_rect_with(square, order, DEFAULT_CELLS, |p| {
        let l = Local::at(g, z, p)?;
        Ok((2.0 * l.det_hess() / l.det_g - k.value(p)? * l.grad_sq) * l.det_g.sqrt())
    })?;
    let rhs = boundary_integral_rhs(g, z, square, order)?;
    Ok(IdentityValue { lhs, rhs, residual: lhs - rhs })
}

pub fn generalized_identity_residual(
    g: &Metric2,
    z: &ScalarField,
    k: &ScalarField,
    square: &Rect,
    order: usize,
) -> Result<f64> {
    Ok(generalized_identity(g, z, k, square, order)?.residual)
}

/// Largest `|darboux_residual|` over a lattice of the square.
pub fn darboux_gate(g: &Metric2, z: &ScalarField, k: &ScalarField, square: &Rect) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in square.lattice(GATE_SAMPLES) {
        worst = worst.max(darboux_residual(g, z, k, p)?.abs());
    }
    Ok(worst)
}

/// `∫ K(2 − 3|∇_g z|²) dω − ∮ …`. Refuses unless `z` solves the Darboux
/// equation on the square to within `gate_tol`.
pub fn boundary_identity(
    g: &Metric2,
    z: &ScalarField,
    k: &ScalarField,
    square: &Rect,
    order: usize,
    gate_tol: f64,
) -> Result<IdentityValue> {
    let gate = darboux_gate(g, z, k, square)?;
    if !(gate <= gate_tol) {
        return Err(Error::Precondition(format!(
            "z does not solve the Darboux equation on the square: residual {gate:e} > {gate_tol:e}"
        )));
    }
    let lhs = interior_integral_lhs(g, z, k, square, order)?;
    let rhs = boundary_integral_rhs(g, z, square, order)?;
    Ok(IdentityValue { lhs, rhs, residual: lhs - rhs })
}

pub fn eq8_residual(g: &Metric2, z: &ScalarField, k: &ScalarField, square: &Rect, order: usize) -> Result<f64> {
    Ok(boundary_identity(g, z, k, square, order, DEFAULT_GATE_TOL)?.residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryScan {
    /// `max |∇₂₂z|` over the vertical sides.
    pub max_vertical: f64,
    /// `max |∇₁₁z|` over the horizontal sides.
    pub max_horizontal: f64,
    pub max: f64,
    pub argmax: Point,
    pub side: Side,
}

/// Dense scan of `|∇₂₂z|` on the vertical sides and `|∇₁₁z|` on the
/// horizontal ones, with golden-section refinement around the coarse
/// maximum of each side.
pub fn lemma2_boundary_scan(g: &Metric2, z: &ScalarField, square: &Rect) -> Result<BoundaryScan> {
    let mut best: Option<(f64, Point, Side)> = None;
    let mut max_v = 0.0f64;
    let mut max_h = 0.0f64;
    for side in Side::ALL {
        let (a, b) = side.segment(square);
        let at = |t: f64| Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        let vertical = matches!(side, Side::Left | Side::Right);
        let f = |t: f64| -> Result<f64> {
            let l = Local::at(g, z, at(t))?;
            Ok(if vertical { l.hess[1][1] } else { l.hess[0][0] }.abs())
        };
        let mut coarse = (f64::NEG_INFINITY, 0usize);
        for i in 0..SCAN_SAMPLES {
            let v = f(i as f64 / (SCAN_SAMPLES - 1) as f64)?;
            if v > coarse.0 {
                coarse = (v, i);
            }
        }
        let dt = 1.0 / (SCAN_SAMPLES - 1) as f64;
        let lo = (coarse.1 as f64 - 1.0).max(0.0) * dt;
        let hi = ((coarse.1 as f64 + 1.0) * dt).min(1.0);
        let (t_ref, v_ref) = golden_max(&f, lo, hi)?;
        let (v, t) = if v_ref > coarse.0 { (v_ref, t_ref) } else { (coarse.0, coarse.1 as f64 * dt) };
        if vertical {
            max_v = max_v.max(v);
        } else {
            max_h = max_h.max(v);
        }
        if best.is_none_or(|(bv, _, _)| v > bv) {
            best = Some((v, at(t), side));
        }
    }
    let (max, argmax, side) = best.expect("four sides scanned");
    Ok(BoundaryScan { max_vertical: max_v, max_horizontal: max_h, max, argmax, side })
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Minimum of `2 − 3|∇_g z|²` over a dense lattice of the square.
pub fn smallness_certificate(g: &Metric2, z: &ScalarField, square: &Rect) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for p in square.lattice(CERTIFICATE_SAMPLES) {
        let l = Local::at(g, z, p)?;
        worst = worst.min(2.0 - 3.0 * l.grad_sq);
    }
    Ok(worst)
}

/// One line of a JSON check report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub square: Rect,
    pub value_lhs: f64,
    pub value_rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, square: Rect, v: IdentityValue, tolerance: f64) -> Self {
        CheckRecord {
            check: check.into(),
            square,
            value_lhs: v.lhs,
            value_rhs: v.rhs,
            residual: v.residual,
            tolerance,
            pass: v.residual.abs() < tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::DEFAULT_ORDER;

    fn unit() -> Rect {
        Rect::new(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn flat_paraboloid_closed_form() {
        let d = Rect::new(-2.0, 2.0, -2.0, 2.0);
        let g = Metric2::flat(d);
        let z = ScalarField::analytic(d, |x, y| x * x + y * y);
        let k = ScalarField::constant(d, 0.0);
        let v = generalized_identity(&g, &z, &k, &unit(), DEFAULT_ORDER).unwrap();
        assert!((v.lhs - 8.0).abs() < 1e-12 && (v.rhs - 8.0).abs() < 1e-12);
        let inward = boundary_integral(&g, &z, &unit(), DEFAULT_ORDER, Orientation::Inward).unwrap();
        assert_eq!(inward, -v.rhs);
    }

    #[test]
    fn interior_examples() {
        let d = Rect::new(-2.0, 2.0, -2.0, 2.0);
        let g = Metric2::flat(d);
        let z = ScalarField::constant(d, 0.0);
        let one = ScalarField::constant(d, 1.0);
        assert!((interior_integral_lhs(&g, &z, &one, &unit(), DEFAULT_ORDER).unwrap() - 2.0).abs() < 1e-13);
        let zero = ScalarField::constant(d, 0.0);
        assert_eq!(interior_integral_lhs(&g, &z, &zero, &unit(), DEFAULT_ORDER).unwrap(), 0.0);
        assert_eq!(boundary_integral_rhs(&g, &z, &unit(), DEFAULT_ORDER).unwrap(), 0.0);
    }

    #[test]
    fn gate_refuses_non_solutions() {
        let d = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let g = Metric2::flat(d);
        let z = ScalarField::analytic(d, |x, y| (x * x + y * y) * 0.5);
        let k = ScalarField::constant(d, 0.0);
        assert!(matches!(
            eq8_residual(&g, &z, &k, &Rect::square(Point::new(0.0, 0.0), 0.5), DEFAULT_ORDER),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn scan_examples() {
        let d = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let g = Metric2::flat(d);
        let z = ScalarField::analytic(d, |x, y| (x * x + y * y) * 0.5);
        let sq = Rect::square(Point::new(0.0, 0.0), 0.1);
        let s = lemma2_boundary_scan(&g, &z, &sq).unwrap();
        assert!((s.max_vertical - 1.0).abs() < 1e-14 && (s.max - 1.0).abs() < 1e-14);
        let zero = ScalarField::constant(d, 0.0);
        assert_eq!(lemma2_boundary_scan(&g, &zero, &sq).unwrap().max, 0.0);
    }

    #[test]
    fn certificate_examples() {
        let d = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let g = Metric2::flat(d);
        let z = ScalarField::analytic(d, |x, _| x);
        assert!((smallness_certificate(&g, &z, &unit().intersect(&d)).unwrap() + 1.0).abs() < 1e-14);
        let z = ScalarField::analytic(d, |x, y| x * x + y * y);
        let tiny = Rect::square(Point::new(0.0, 0.0), 1e-4);
        assert!((smallness_certificate(&g, &z, &tiny).unwrap() - 2.0).abs() < 1e-6);
    }
}
