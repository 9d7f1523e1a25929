//! Passing between surfaces in ℝ³ and solutions of the Darboux equation.
//!
//! Forward: an embedding `F = (z₁, z₂, z₃)` induces `g`, and `z = z₃`
//! solves the Darboux equation for `(g, K)`. Backward: for a solution `z`
//! with `|∇_g z| < 1`, the metric `h = g − dz²` is flat, and developing it
//! gives `z₁, z₂` with `h = dz₁² + dz₂²`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{write_columns_csv, Grid2D, Point, Rect, ScalarField};
use crate::geometry::{darboux_residual, gaussian_curvature, gaussian_curvature_field, grad_norm_sq, Metric2};
use crate::jet::Jet;
use crate::ode::rk4_step;

/// Points per axis used when a check samples its domain.
pub const SAMPLES_PER_AXIS: usize = 9;

#[derive(Clone, Debug)]
pub struct Embedding3 {
    pub z: [ScalarField; 3],
}

type Vec3 = [f64; 3];

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Embedding3 {
    pub fn new(z1: ScalarField, z2: ScalarField, z3: ScalarField) -> Self {
        Embedding3 { z: [z1, z2, z3] }
    }

    /// `(x, y, f(x, y))`.
    pub fn graph<F>(domain: Rect, f: F) -> Self
    where
        F: Fn(Jet, Jet) -> Jet + Send + Sync + 'static,
    {
        Embedding3::new(
            ScalarField::analytic(domain, |x, _| x),
            ScalarField::analytic(domain, |_, y| y),
            ScalarField::analytic(domain, f),
        )
    }

    pub fn domain(&self) -> Rect {
        self.z[0].domain().intersect(&self.z[1].domain()).intersect(&self.z[2].domain())
    }

    /// `(∂₁F, ∂₂F)` at `p`.
    pub fn tangents(&self, p: Point) -> Result<(Vec3, Vec3)> {
        let mut t = ([0.0; 3], [0.0; 3]);
        for (a, z) in self.z.iter().enumerate() {
            let j = z.jet(p, 1)?;
            t.0[a] = j.partial(1, 0);
            t.1[a] = j.partial(0, 1);
        }
        Ok(t)
    }

    /// Unit normal `ν = ∂₁F × ∂₂F / |∂₁F × ∂₂F|`.
    pub fn unit_normal(&self, p: Point) -> Result<Vec3> {
        let (a, b) = self.tangents(p)?;
        let n = cross(a, b);
        let len = dot(n, n).sqrt();
        let scale = dot(a, a).sqrt() * dot(b, b).sqrt();
        if !(len > 1e-12 * scale) {
            return Err(Error::DegenerateTangentPlane(p));
        }
        Ok([n[0] / len, n[1] / len, n[2] / len])
    }

    /// Applies `z̄_a = Σ_b A_ab z_b`.
    pub fn rotated(&self, a: [[f64; 3]; 3]) -> Self {
        let comp =
            |row: [f64; 3]| ScalarField::combine(&self.z, move |j| j[0] * row[0] + j[1] * row[1] + j[2] * row[2]);
        Embedding3::new(comp(a[0]), comp(a[1]), comp(a[2]))
    }

    /// CSV dump with columns `x,y,z1,z2,z3`.
    pub fn write_csv<W: Write>(&self, out: W, grid: &Grid2D) -> Result<()> {
        write_columns_csv(out, grid, &["z1", "z2", "z3"], &[&self.z[0], &self.z[1], &self.z[2]])
    }
}

/// `gᵢⱼ = Σ_α ∂ᵢz_α ∂ⱼz_α`.
pub fn induced_metric(f: &Embedding3) -> Metric2 {
    let comp = |i: usize, j: usize| {
        let z = f.z.clone();
        ScalarField::from_jet_fn(f.domain(), move |p, deg| {
            let mut acc = Jet::constant(0.0, deg);
            for za in &z {
                let jet = za.jet(p, deg + 1)?;
                acc += jet.d(i) * jet.d(j);
            }
            Ok(acc)
        })
    };
    Metric2::new(comp(0, 0), comp(0, 1), comp(1, 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalComponent {
    /// `(ν·k)²` from the cross product.
    pub cross_product: f64,
    /// `1 − gⁱʲ∂ᵢz₃∂ⱼz₃`.
    pub gradient: f64,
    pub difference: f64,
}

pub fn normal_component_sq(f: &Embedding3, p: Point) -> Result<NormalComponent> {
    let nu = f.unit_normal(p)?;
    let g = induced_metric(f);
    let cross_product = nu[2] * nu[2];
    let gradient = 1.0 - grad_norm_sq(&g, &f.z[2], p)?;
    Ok(NormalComponent { cross_product, gradient, difference: cross_product - gradient })
}

fn sample_points(domain: &Rect) -> Vec<Point> {
    domain.lattice(SAMPLES_PER_AXIS)
}

/// Largest `|darboux_residual(g, z₃, K)|` over a sample lattice, with `g`
/// induced by `F` and `K` its Gaussian curvature.
pub fn verify_gauss_darboux(f: &Embedding3) -> Result<f64> {
    let g = induced_metric(f);
    let k = gaussian_curvature_field(&g);
    let mut worst = 0.0f64;
    for p in sample_points(&f.domain()) {
        worst = worst.max(darboux_residual(&g, &f.z[2], &k, p)?.abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub embedding: Embedding3,
}

/// Rotation `A` with `Aν(p) = (0, 0, 1)`, applied to `F`.
pub fn rigid_normalize(f: &Embedding3, p: Point) -> Result<RigidMotion> {
    let nu = f.unit_normal(p)?;
    let c = nu[2];
    let rotation = if c < -1.0 + 1e-12 {
        [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]
    } else {
        // Rodrigues with v = ν × k: A = I + [v]ₓ + [v]ₓ² / (1 + c).
        let v = cross(nu, [0.0, 0.0, 1.0]);
        let vx = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let sq: f64 = (0..3).map(|k| vx[i][k] * vx[k][j]).sum();
                a[i][j] = if i == j { 1.0 } else { 0.0 } + vx[i][j] + sq / (1.0 + c);
            }
        }
        a
    };
    Ok(RigidMotion { rotation, embedding: f.rotated(rotation) })
}

/// `hᵢⱼ = gᵢⱼ − ∂ᵢz∂ⱼz`.
pub fn flat_candidate(g: &Metric2, z: &ScalarField) -> Metric2 {
    let comp = |i: usize, j: usize, gij: &ScalarField| {
        let (gij, z) = (gij.clone(), z.clone());
        ScalarField::from_jet_fn(gij.domain().intersect(&z.domain()), move |p, deg| {
            let zj = z.jet(p, deg + 1)?;
            Ok(gij.jet(p, deg)? - zj.d(i) * zj.d(j))
        })
    };
    Metric2::new(comp(0, 0, &g.g11), comp(0, 1, &g.g12), comp(1, 1, &g.g22))
}

/// Largest `|K(g − dz²)|` over a sample lattice. Fails when
/// `|∇_g z| >= 1` at a sample point.
pub fn flatness_residual(g: &Metric2, z: &ScalarField) -> Result<f64> {
    let domain = g.domain().intersect(&z.domain());
    let h = flat_candidate(g, z);
    let mut worst = 0.0f64;
    for p in sample_points(&domain) {
        let gn = grad_norm_sq(g, z, p)?;
        if gn >= 1.0 {
            return Err(Error::Precondition(format!("|∇_g z|² = {gn} >= 1 at {p}")));
        }
        worst = worst.max(gaussian_curvature(&h, p)?.abs());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DevelopOptions {
    pub step: f64,
    /// Largest allowed change in `(z₁, z₂)` between the two path orders.
    pub path_tol: f64,
    /// Largest allowed `|K(h)|` at the sample points.
    pub flatness_tol: f64,
}

impl Default for DevelopOptions {
    fn default() -> Self {
        DevelopOptions { step: 0.01, path_tol: 1e-6, flatness_tol: 1e-5 }
    }
}

#[derive(Clone, Debug)]
pub struct Development {
    pub z1: ScalarField,
    pub z2: ScalarField,
    pub grid: Grid2D,
    pub path_discrepancy: f64,
}

/// Orthonormal coframe `θ¹ = e11 dx`, `θ² = e21 dx + e22 dy` obtained by
/// Gram–Schmidt, and the connection form `ω = ωx dx + ωy dy` with
/// `dθ¹ = ω∧θ²`, `dθ² = −ω∧θ¹`.
#[derive(Clone, Copy, Debug)]
struct Coframe {
    e11: f64,
    e21: f64,
    e22: f64,
    wx: f64,
    wy: f64,
}

fn coframe(h: &Metric2, p: Point) -> Result<Coframe> {
    let m = h.jets(p, 1)?;
    let (h12, h22) = (m.g[0][1], m.g[1][1]);
    let s22 = h22.sqrt();
    let e11 = (m.det / h22).sqrt();
    let e21 = h12 / s22;
    let e22 = s22;
    let det_e = e11.value() * e22.value();
    // dθᵃ = cᵃ dx∧dy with cᵃ = ∂₁eᵃ₂ − ∂₂eᵃ₁.
    let c1 = -e11.dy().value();
    let c2 = e22.dx().value() - e21.dy().value();
    let (w1, w2) = (c1 / det_e, c2 / det_e);
    Ok(Coframe {
        e11: e11.value(),
        e21: e21.value(),
        e22: e22.value(),
        wx: w1 * e11.value() + w2 * e21.value(),
        wy: w2 * e22.value(),
    })
}

/// Derivative of `(ψ, z₁, z₂)` along coordinate `axis`: `dψ = ω`, and
/// `dz` is the coframe rotated by `ψ`.
fn leg_rhs(h: &Metric2, axis: usize, fixed: f64) -> impl Fn(f64, [f64; 3]) -> Result<[f64; 3]> + '_ {
    move |t, s| {
        let p = if axis == 0 { Point::new(t, fixed) } else { Point::new(fixed, t) };
        let c = coframe(h, p)?;
        let (sn, cs) = s[0].sin_cos();
        Ok(if axis == 0 {
            [c.wx, cs * c.e11 - sn * c.e21, sn * c.e11 + cs * c.e21]
        } else {
            [c.wy, -sn * c.e22, cs * c.e22]
        })
    }
}

/// States along one grid line, integrated from index `start` both ways.
fn integrate_line(
    h: &Metric2,
    grid: &Grid2D,
    axis: usize,
    line: usize,
    start: usize,
    init: [f64; 3],
) -> Result<Vec<[f64; 3]>> {
    let (n, fixed, coord): (usize, f64, Box<dyn Fn(usize) -> f64>) = if axis == 0 {
        (grid.nx, grid.y(line), Box::new(|i| grid.x(i)))
    } else {
        (grid.ny, grid.x(line), Box::new(|j| grid.y(j)))
    };
    let rhs = leg_rhs(h, axis, fixed);
    let mut out = vec![[0.0; 3]; n];
    out[start] = init;
    let mut s = init;
    for i in start..n - 1 {
        s = rk4_step(&rhs, coord(i), s, grid.h)?;
        out[i + 1] = s;
    }
    s = init;
    for i in (1..=start).rev() {
        s = rk4_step(&rhs, coord(i), s, -grid.h)?;
        out[i - 1] = s;
    }
    Ok(out)
}

/// States on the whole grid: along `first` axis through the base, then
/// along the other axis from every node of that line. Row-major.
fn integrate_grid(h: &Metric2, grid: &Grid2D, base: (usize, usize), first: usize) -> Result<Vec<[f64; 3]>> {
    let (bi, bj) = base;
    let second = 1 - first;
    let spine = if first == 0 {
        integrate_line(h, grid, 0, bj, bi, [0.0; 3])?
    } else {
        integrate_line(h, grid, 1, bi, bj, [0.0; 3])?
    };
    let ribs: Vec<Vec<[f64; 3]>> = (0..spine.len())
        .into_par_iter()
        .map(|k| {
            let start = if second == 1 { bj } else { bi };
            integrate_line(h, grid, second, k, start, spine[k])
        })
        .collect::<Result<_>>()?;
    let mut out = vec![[0.0; 3]; grid.len()];
    for (k, rib) in ribs.iter().enumerate() {
        for (m, s) in rib.iter().enumerate() {
            let (i, j) = if first == 0 { (k, m) } else { (m, k) };
            out[j * grid.nx + i] = *s;
        }
    }
    Ok(out)
}

/// Flat coordinates `(z₁, z₂)` with `h = dz₁² + dz₂²`, normalized so that
/// `z(base) = 0` and `dz₁(base)` is proportional to `dx`.
pub fn develop_flat(h: &Metric2, base: Point, opts: &DevelopOptions) -> Result<Development> {
    let domain = h.domain();
    let mut curv = 0.0f64;
    for p in sample_points(&domain) {
        curv = curv.max(gaussian_curvature(h, p)?.abs());
    }
    if curv > opts.flatness_tol {
        return Err(Error::Development(format!("metric is not flat: |K| reaches {curv:e}")));
    }
    let (grid, base_idx) = Grid2D::anchored(&domain, base, opts.step)?;
    let xy = integrate_grid(h, &grid, base_idx, 0)?;
    let yx = integrate_grid(h, &grid, base_idx, 1)?;
    let path_discrepancy =
        xy.iter().zip(&yx).map(|(a, b)| (a[1] - b[1]).abs().max((a[2] - b[2]).abs())).fold(0.0, f64::max);
    if path_discrepancy > opts.path_tol {
        return Err(Error::Development(format!("path dependence {path_discrepancy:e} exceeds {:e}", opts.path_tol)));
    }
    let z1 = ScalarField::sampled(grid, xy.iter().map(|s| s[1]).collect())?;
    let z2 = ScalarField::sampled(grid, xy.iter().map(|s| s[2]).collect())?;
    Ok(Development { z1, z2, grid, path_discrepancy })
}

/// Largest `|g(F)ᵢⱼ − gᵢⱼ|` over a sample lattice of `domain`.
pub fn metric_mismatch(a: &Metric2, b: &Metric2, domain: &Rect) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in sample_points(domain) {
        let (x, y) = (a.at(p)?, b.at(p)?);
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((x[i][j] - y[i][j]).abs());
            }
        }
    }
    Ok(worst)
}

/// Named test surfaces and metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixture {
    Plane,
    Sphere,
    Saddle,
    Saddle2,
    Cosmetric,
}

impl Fixture {
    pub const ALL: [Fixture; 5] =
        [Fixture::Plane, Fixture::Sphere, Fixture::Saddle, Fixture::Saddle2, Fixture::Cosmetric];

    pub fn parse(name: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Plane => "plane",
            Fixture::Sphere => "sphere",
            Fixture::Saddle => "saddle",
            Fixture::Saddle2 => "saddle2",
            Fixture::Cosmetric => "cosmetric",
        }
    }

    pub fn domain(self) -> Rect {
        match self {
            Fixture::Plane | Fixture::Cosmetric => Rect::new(-1.0, 1.0, -1.0, 1.0),
            Fixture::Sphere => Rect::new(-0.3, 0.3, -0.3, 0.3),
            Fixture::Saddle => Rect::new(-0.5, 0.5, -0.5, 0.5),
            Fixture::Saddle2 => Rect::new(-0.25, 0.25, -0.25, 0.25),
        }
    }

    /// The surface, or `None` for the purely intrinsic fixture.
    pub fn embedding(self) -> Option<Embedding3> {
        let d = self.domain();
        match self {
            Fixture::Plane => Some(Embedding3::graph(d, |x, _| x * 0.0)),
            Fixture::Sphere => Some(Embedding3::graph(d, |x, y| (4.0 - x * x - y * y).sqrt())),
            Fixture::Saddle => Some(Embedding3::graph(d, |x, y| x * y)),
            Fixture::Saddle2 => Some(Embedding3::graph(d, |x, y| x * x - y * y)),
            Fixture::Cosmetric => None,
        }
    }

    pub fn metric(self) -> Metric2 {
        match self.embedding() {
            Some(f) => induced_metric(&f),
            None => Metric2::warped(&ScalarField::analytic(self.domain(), |x, _| x.cos())),
        }
    }

    /// A Darboux solution for the fixture's metric: the height function for
    /// surfaces, and for the intrinsic metric `cos x cos y`, the third
    /// coordinate of `(cos x sin y, sin x, cos x cos y)`, which embeds
    /// `dx² + cos²x dy²` as the unit sphere.
    pub fn height(self) -> ScalarField {
        match self.embedding() {
            Some(f) => f.z[2].clone(),
            None => ScalarField::analytic(self.domain(), |x, y| x.cos() * y.cos()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induced_metric_examples() {
        let g = Fixture::Plane.metric();
        assert_eq!(g.at(Point::new(0.3, -0.2)).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        let g = Fixture::Saddle.metric();
        let p = Point::new(0.3, -0.4);
        let m = g.at(p).unwrap();
        assert!((m[0][0] - 1.16).abs() < 1e-15 && (m[0][1] + 0.12).abs() < 1e-15 && (m[1][1] - 1.09).abs() < 1e-15);
        let s = Fixture::Sphere.metric().at(Point::new(0.0, 0.0)).unwrap();
        assert!((s[0][0] - 1.0).abs() < 1e-15 && s[0][1].abs() < 1e-15 && (s[1][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normal_component_examples() {
        let sad = Fixture::Saddle.embedding().unwrap();
        let nc = normal_component_sq(&sad, Point::new(0.5, 0.5)).unwrap();
        assert!((nc.cross_product - 2.0 / 3.0).abs() < 1e-14);
        assert!(nc.difference.abs() < 1e-14);
        let sph = Fixture::Sphere.embedding().unwrap();
        assert!((normal_component_sq(&sph, Point::new(0.0, 0.0)).unwrap().cross_product - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rodrigues_on_tilted_plane() {
        let f = Embedding3::graph(Rect::new(-1.0, 1.0, -1.0, 1.0), |x, _| x);
        let r = rigid_normalize(&f, Point::new(0.0, 0.0)).unwrap();
        let zbar = r.embedding.z[2].jet(Point::new(0.0, 0.0), 1).unwrap();
        assert!(zbar.partial(1, 0).abs() < 1e-12 && zbar.partial(0, 1).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [[h, 0.0, h], [0.0, 1.0, 0.0], [-h, 0.0, h]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.rotation[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn antipodal_normal_uses_half_turn() {
        // (y, x, 0) has normal −k.
        let d = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let f = Embedding3::new(
            ScalarField::analytic(d, |_, y| y),
            ScalarField::analytic(d, |x, _| x),
            ScalarField::constant(d, 0.0),
        );
        let r = rigid_normalize(&f, Point::new(0.0, 0.0)).unwrap();
        let nu = r.embedding.unit_normal(Point::new(0.0, 0.0)).unwrap();
        assert!((nu[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_conformal_metric_develops_to_polar_chart() {
        let d = Rect::new(-0.3, 0.3, -0.3, 0.3);
        let e2x = ScalarField::analytic(d, |x, _| (x * 2.0).exp());
        let h = Metric2::new(e2x.clone(), ScalarField::constant(d, 0.0), e2x);
        let dev = develop_flat(&h, Point::new(0.0, 0.0), &DevelopOptions::default()).unwrap();
        for p in d.lattice(7) {
            let (a, b) = (dev.z1.value(p).unwrap(), dev.z2.value(p).unwrap());
            assert!((a - (p.x.exp() * p.y.cos() - 1.0)).abs() < 1e-9, "{p}");
            assert!((b - p.x.exp() * p.y.sin()).abs() < 1e-9, "{p}");
        }
        assert!(dev.path_discrepancy < 1e-9);
    }

    #[test]
    fn unknown_fixture() {
        assert!(Fixture::parse("torus").is_err());
        assert_eq!(Fixture::parse("saddle2").unwrap(), Fixture::Saddle2);
    }
}
