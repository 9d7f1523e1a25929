//! Metric tensor calculus in two dimensions: Christoffel symbols, Gaussian
//! curvature, covariant Hessians, the cofactor tensor `bⁱʲ`, and the Darboux
//! residual.
//!
//! Index convention: `x¹ = x`, `x² = y`, stored zero-based. Raised indices
//! always use `gⁱʲ = (gᵢⱼ)⁻¹`. Every quantity is computed on Taylor jets at
//! the query point, so derivatives of derived quantities (for example
//! `∂Γ` in the curvature, or `∂bⁱʲ` in the divergence) come from exact series
//! arithmetic on analytic fields and from order-4 stencils on sampled ones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{Grid2D, Point, Rect, ScalarField};
use crate::jet::Jet;

/// Symmetric positive-definite metric `g₁₁ dx² + 2g₁₂ dx dy + g₂₂ dy²`.
#[derive(Clone, Debug)]
pub struct Metric2 {
    pub g11: ScalarField,
    pub g12: ScalarField,
    pub g22: ScalarField,
}

impl Metric2 {
    pub fn new(g11: ScalarField, g12: ScalarField, g22: ScalarField) -> Self {
        Metric2 { g11, g12, g22 }
    }

    pub fn flat(domain: Rect) -> Self {
        Metric2::new(
            ScalarField::constant(domain, 1.0),
            ScalarField::constant(domain, 0.0),
            ScalarField::constant(domain, 1.0),
        )
    }

    /// `dx² + G² dy²`.
    pub fn warped(warp: &ScalarField) -> Self {
        let d = warp.domain();
        Metric2::new(
            ScalarField::constant(d, 1.0),
            ScalarField::constant(d, 0.0),
            ScalarField::combine(std::slice::from_ref(warp), |j| j[0] * j[0]),
        )
    }

    pub fn domain(&self) -> Rect {
        self.g11.domain().intersect(&self.g12.domain()).intersect(&self.g22.domain())
    }

    /// Largest jet degree all three components can produce.
    pub fn max_degree(&self) -> usize {
        self.g11.max_degree().min(self.g12.max_degree()).min(self.g22.max_degree())
    }

    /// Metric jets at `p`; fails if `g` is not positive definite there.
    pub fn jets(&self, p: Point, deg: usize) -> Result<MetricJets> {
        let g11 = self.g11.jet(p, deg)?;
        let g12 = self.g12.jet(p, deg)?;
        let g22 = self.g22.jet(p, deg)?;
        MetricJets::new(p, g11, g12, g22)
    }

    pub fn at(&self, p: Point) -> Result<[[f64; 2]; 2]> {
        let m = self.jets(p, 0)?;
        Ok([[m.g[0][0].value(), m.g[0][1].value()], [m.g[1][0].value(), m.g[1][1].value()]])
    }

    pub fn resample(&self, grid: Grid2D) -> Result<Metric2> {
        Ok(Metric2::new(self.g11.resample(grid)?, self.g12.resample(grid)?, self.g22.resample(grid)?))
    }

    /// The same metric written in the coordinates `(y, x)`.
    pub fn transposed(&self) -> Metric2 {
        Metric2::new(self.g22.transposed(), self.g12.transposed(), self.g11.transposed())
    }
}

/// Metric components, determinant, and inverse as jets at one point.
#[derive(Clone, Debug)]
pub struct MetricJets {
    pub g: [[Jet; 2]; 2],
    pub det: Jet,
    pub inv: [[Jet; 2]; 2],
}

impl MetricJets {
    pub fn new(p: Point, g11: Jet, g12: Jet, g22: Jet) -> Result<Self> {
        let det = g11 * g22 - g12 * g12;
        if !(g11.value() > 0.0 && det.value() > 0.0) || !det.value().is_finite() {
            return Err(Error::DegenerateMetric(p));
        }
        let rdet = det.recip();
        let inv = [[g22 * rdet, -g12 * rdet], [-g12 * rdet, g11 * rdet]];
        Ok(MetricJets { g: [[g11, g12], [g12, g22]], det, inv })
    }

    pub fn deg(&self) -> usize {
        self.det.deg()
    }
}

/// `Γ[l][i][j] = Γˡᵢⱼ` as jets.
pub type ChristoffelJets = [[[Jet; 2]; 2]; 2];

/// `Γˡᵢⱼ = ½ gˡᵐ(∂ᵢgⱼₘ + ∂ⱼgᵢₘ − ∂ₘgᵢⱼ)`; one degree less than the metric.
pub fn christoffel_jets(m: &MetricJets) -> ChristoffelJets {
    let dg = [
        [[m.g[0][0].dx(), m.g[0][1].dx()], [m.g[1][0].dx(), m.g[1][1].dx()]],
        [[m.g[0][0].dy(), m.g[0][1].dy()], [m.g[1][0].dy(), m.g[1][1].dy()]],
    ];
    let deg = m.deg() - 1;
    let zero = Jet::constant(0.0, deg);
    let mut first = [[[zero; 2]; 2]; 2];
    for mm in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                first[mm][i][j] = (dg[i][j][mm] + dg[j][i][mm] - dg[mm][i][j]) * 0.5;
            }
        }
    }
    let mut gamma = [[[zero; 2]; 2]; 2];
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                gamma[l][i][j] = m.inv[l][0] * first[0][i][j] + m.inv[l][1] * first[1][i][j];
            }
        }
    }
    gamma
}

/// Per-point geometric data shared by the kernel operations.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: Point,
    pub metric: MetricJets,
    pub gamma: ChristoffelJets,
}

impl PointGeometry {
    /// `deg` is the metric jet degree; derived quantities lose degrees as
    /// they differentiate.
    pub fn at(g: &Metric2, p: Point, deg: usize) -> Result<Self> {
        let metric = g.jets(p, deg.max(1))?;
        let gamma = christoffel_jets(&metric);
        Ok(PointGeometry { point: p, metric, gamma })
    }

    /// `Rⁱ₂₁₂ = ∂₁Γⁱ₂₂ − ∂₂Γⁱ₁₂ + Γʲ₂₂Γⁱⱼ₁ − Γʲ₁₂Γⁱⱼ₂` (needs metric degree ≥ 2).
    pub fn riemann_212(&self) -> [Jet; 2] {
        let g = &self.gamma;
        let mut out = [Jet::constant(0.0, 0); 2];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut r = g[i][1][1].dx() - g[i][0][1].dy();
            for j in 0..2 {
                r += g[j][1][1] * g[i][j][0] - g[j][0][1] * g[i][j][1];
            }
            *slot = r;
        }
        out
    }

    /// `K = R₁₂₁₂ / |g|` with `R₁₂₁₂ = g₁ₘRᵐ₂₁₂`.
    pub fn curvature(&self) -> Jet {
        let r = self.riemann_212();
        let r1212 = self.metric.g[0][0] * r[0] + self.metric.g[0][1] * r[1];
        r1212 / self.metric.det
    }

    /// `∇ᵢⱼz = ∂ᵢⱼz − Γˡᵢⱼ∂ₗz`.
    pub fn hessian(&self, z: &Jet) -> [[Jet; 2]; 2] {
        let zx = z.dx();
        let zy = z.dy();
        let dz = [zx, zy];
        let second = [[zx.dx(), zx.dy()], [zy.dx(), zy.dy()]];
        let mut h = [[Jet::constant(0.0, 0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = second[i][j] - self.gamma[0][i][j] * dz[0] - self.gamma[1][i][j] * dz[1];
            }
        }
        h
    }

    /// `zʲ = gʲⁱ∂ᵢz`.
    pub fn raised_gradient(&self, z: &Jet) -> [Jet; 2] {
        let dz = [z.dx(), z.dy()];
        let inv = &self.metric.inv;
        [inv[0][0] * dz[0] + inv[0][1] * dz[1], inv[1][0] * dz[0] + inv[1][1] * dz[1]]
    }

    /// `|∇_g z|² = gⁱʲ∂ᵢz∂ⱼz`.
    pub fn grad_norm_sq(&self, z: &Jet) -> Jet {
        let up = self.raised_gradient(z);
        up[0] * z.dx() + up[1] * z.dy()
    }

    /// Cofactor tensor `bⁱʲ = |g|⁻¹ adj(∇ᵢⱼz)`.
    pub fn b(&self, z: &Jet) -> [[Jet; 2]; 2] {
        let h = self.hessian(z);
        let r = self.metric.det.recip();
        let b12 = -h[0][1] * r;
        [[h[1][1] * r, b12], [b12, h[0][0] * r]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChristoffelAt {
    /// `gamma[l][i][j] = Γˡᵢⱼ`, zero-based.
    pub gamma: [[[f64; 2]; 2]; 2],
}

impl ChristoffelAt {
    /// Γˡᵢⱼ with one-based indices as written in formulas.
    pub fn get(&self, l: usize, i: usize, j: usize) -> f64 {
        self.gamma[l - 1][i - 1][j - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BTensorAt {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
}

impl BTensorAt {
    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.b11, self.b12], [self.b12, self.b22]]
    }

    pub fn det(&self) -> f64 {
        self.b11 * self.b22 - self.b12 * self.b12
    }

    pub fn max_abs(&self) -> f64 {
        self.b11.abs().max(self.b12.abs()).max(self.b22.abs())
    }
}

pub fn christoffel(g: &Metric2, p: Point) -> Result<ChristoffelAt> {
    let pg = PointGeometry::at(g, p, 1)?;
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for (l, gl) in gamma.iter_mut().enumerate() {
        for (i, gli) in gl.iter_mut().enumerate() {
            for (j, v) in gli.iter_mut().enumerate() {
                *v = pg.gamma[l][i][j].value();
            }
        }
    }
    Ok(ChristoffelAt { gamma })
}

/// `Γⁱᵢⱼ − |g|^{-1/2} ∂ⱼ|g|^{1/2}` for `j = 1, 2`.
pub fn christoffel_trace_residual(g: &Metric2, p: Point) -> Result<[f64; 2]> {
    let pg = PointGeometry::at(g, p, 1)?;
    let root = pg.metric.det.sqrt();
    let mut out = [0.0; 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let trace = pg.gamma[0][0][j].value() + pg.gamma[1][1][j].value();
        *slot = trace - root.d(j).value() / root.value();
    }
    Ok(out)
}

/// Gaussian curvature through the Riemann tensor.
pub fn gaussian_curvature(g: &Metric2, p: Point) -> Result<f64> {
    Ok(PointGeometry::at(g, p, 2)?.curvature().value())
}

/// Gaussian curvature through the Brioschi formula in `E = g₁₁`,
/// `F = g₁₂`, `G = g₂₂`; an index-free cross-check of the Riemann route.
pub fn gaussian_curvature_brioschi(g: &Metric2, p: Point) -> Result<f64> {
    let m = g.jets(p, 2)?;
    let (e, f, gg) = (m.g[0][0], m.g[0][1], m.g[1][1]);
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let (ev, eu, evv) = (e.partial(0, 1), e.partial(1, 0), e.partial(0, 2));
    let (fu, fv, fuv) = (f.partial(1, 0), f.partial(0, 1), f.partial(1, 1));
    let (gu, gv, guu) = (gg.partial(1, 0), gg.partial(0, 1), gg.partial(2, 0));
    let (e0, f0, g0) = (e.value(), f.value(), gg.value());
    let a = [[-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev], [fv - 0.5 * gu, e0, f0], [0.5 * gv, f0, g0]];
    let b = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e0, f0], [0.5 * gu, f0, g0]];
    let w = e0 * g0 - f0 * f0;
    Ok((det3(a) - det3(b)) / (w * w))
}

/// `χⁱ + gⁱ¹|g|K` for `i = 1, 2`, where
/// `χⁱ = ∂₂Γⁱ₁₂ − ∂₁Γⁱ₂₂ + Γʲ₁₂Γⁱⱼ₂ − Γʲ₂₂Γⁱⱼ₁`.
pub fn chi_identity_residual(g: &Metric2, p: Point) -> Result<[f64; 2]> {
    let pg = PointGeometry::at(g, p, 2)?;
    let k = pg.curvature().value();
    let r = pg.riemann_212();
    let det = pg.metric.det.value();
    let mut out = [0.0; 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let chi = -r[i].value();
        *slot = chi + pg.metric.inv[i][0].value() * det * k;
    }
    Ok(out)
}

/// The Gaussian curvature as a field; jets of degree `d` need metric
/// jets of degree `d + 2`.
pub fn gaussian_curvature_field(g: &Metric2) -> ScalarField {
    let g = g.clone();
    ScalarField::from_jet_fn(g.domain(), move |p, deg| Ok(PointGeometry::at(&g, p, deg + 2)?.curvature().truncate(deg)))
}

pub fn covariant_hessian(g: &Metric2, z: &ScalarField, p: Point) -> Result<[[f64; 2]; 2]> {
    let pg = PointGeometry::at(g, p, 1)?;
    let h = pg.hessian(&z.jet(p, 2)?);
    Ok([[h[0][0].value(), h[0][1].value()], [h[1][0].value(), h[1][1].value()]])
}

pub fn grad_norm_sq(g: &Metric2, z: &ScalarField, p: Point) -> Result<f64> {
    let m = g.jets(p, 0)?;
    let zj = z.jet(p, 1)?;
    let (zx, zy) = (zj.partial(1, 0), zj.partial(0, 1));
    let inv = |i: usize, j: usize| m.inv[i][j].value();
    Ok(inv(0, 0) * zx * zx + 2.0 * inv(0, 1) * zx * zy + inv(1, 1) * zy * zy)
}

pub fn b_tensor(g: &Metric2, z: &ScalarField, p: Point) -> Result<BTensorAt> {
    let pg = PointGeometry::at(g, p, 1)?;
    let b = pg.b(&z.jet(p, 2)?);
    Ok(BTensorAt { b11: b[0][0].value(), b12: b[0][1].value(), b22: b[1][1].value() })
}

/// `det(∇ᵢⱼz) − K|g|(1 − |∇_g z|²)`.
pub fn darboux_residual(g: &Metric2, z: &ScalarField, k: &ScalarField, p: Point) -> Result<f64> {
    let pg = PointGeometry::at(g, p, 1)?;
    let zj = z.jet(p, 2)?;
    let h = pg.hessian(&zj);
    let det_h = h[0][0].value() * h[1][1].value() - h[0][1].value() * h[1][0].value();
    let grad = pg.grad_norm_sq(&zj).value();
    Ok(det_h - k.value(p)? * pg.metric.det.value() * (1.0 - grad))
}

/// `(∇ᵢbⁱ¹, ∇ᵢbⁱ²)` straight from the covariant divergence of a
/// contravariant 2-tensor: `∂ᵢbⁱʲ + Γⁱᵢₗbˡʲ + Γʲᵢₗbⁱˡ`.
pub fn b_divergence(g: &Metric2, z: &ScalarField, p: Point) -> Result<(f64, f64)> {
    let (div, _) = divergence_parts(g, z, p)?;
    Ok((div[0], div[1]))
}

fn divergence_parts(g: &Metric2, z: &ScalarField, p: Point) -> Result<([f64; 2], PointGeometry)> {
    let pg = PointGeometry::at(g, p, 2)?;
    let zj = z.jet(p, 3)?;
    let b = pg.b(&zj);
    let gm = &pg.gamma;
    let mut div = [0.0; 2];
    for (j, slot) in div.iter_mut().enumerate() {
        let mut acc = b[0][j].dx().value() + b[1][j].dy().value();
        for i in 0..2 {
            for l in 0..2 {
                acc += gm[i][i][l].value() * b[l][j].value();
                acc += gm[j][i][l].value() * b[i][l].value();
            }
        }
        *slot = acc;
    }
    Ok((div, pg))
}

/// `∇ᵢbⁱʲ + K zʲ` for `j = 1, 2`; vanishes for every smooth `z`.
pub fn divergence_identity_residual(g: &Metric2, z: &ScalarField, p: Point) -> Result<(f64, f64)> {
    let (div, pg) = divergence_parts(g, z, p)?;
    let k = pg.curvature().value();
    let up = pg.raised_gradient(&z.jet(p, 1)?);
    Ok((div[0] + k * up[0].value(), div[1] + k * up[1].value()))
}

/// `bⁱʲ∇ᵢⱼz − 2|g|⁻¹det(∇ᵢⱼz)`; an algebraic identity.
pub fn b_contraction_residual(g: &Metric2, z: &ScalarField, p: Point) -> Result<f64> {
    let pg = PointGeometry::at(g, p, 1)?;
    let zj = z.jet(p, 2)?;
    let h = pg.hessian(&zj);
    let b = pg.b(&zj);
    let mut contraction = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            contraction += b[i][j].value() * h[i][j].value();
        }
    }
    let det_h = h[0][0].value() * h[1][1].value() - h[0][1].value() * h[1][0].value();
    Ok(contraction - 2.0 * det_h / pg.metric.det.value())
}

/// `bⁱʲ` sampled on `grid` as `[b¹¹, b¹², b²²]`.
pub fn b_tensor_sampled(g: &Metric2, z: &ScalarField, grid: Grid2D) -> Result<[ScalarField; 3]> {
    let mut vals = [Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len())];
    for (_, _, p) in grid.nodes() {
        let b = b_tensor(g, z, p)?;
        vals[0].push(b.b11);
        vals[1].push(b.b12);
        vals[2].push(b.b22);
    }
    let [a, b, c] = vals;
    Ok([ScalarField::sampled(grid, a)?, ScalarField::sampled(grid, b)?, ScalarField::sampled(grid, c)?])
}

/// `∇ᵢbⁱʲ + K zʲ` with `∂ᵢbⁱʲ` taken by differencing a sampled `b` (see
/// [`b_tensor_sampled`]) instead of differentiating its defining formula.
pub fn staged_divergence_identity_residual(
    g: &Metric2,
    z: &ScalarField,
    b: &[ScalarField; 3],
    p: Point,
) -> Result<(f64, f64)> {
    let pg = PointGeometry::at(g, p, 2)?;
    let k = pg.curvature().value();
    let up = pg.raised_gradient(&z.jet(p, 1)?);
    let jets = [b[0].jet(p, 1)?, b[1].jet(p, 1)?, b[2].jet(p, 1)?];
    let bb = [[jets[0], jets[1]], [jets[1], jets[2]]];
    let gm = &pg.gamma;
    let mut out = [0.0; 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = bb[0][j].partial(1, 0) + bb[1][j].partial(0, 1);
        for i in 0..2 {
            for l in 0..2 {
                acc += gm[i][i][l].value() * bb[l][j].value();
                acc += gm[j][i][l].value() * bb[i][l].value();
            }
        }
        *slot = acc + k * up[j].value();
    }
    Ok((out[0], out[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom() -> Rect {
        Rect::new(-0.5, 0.5, -0.5, 0.5)
    }

    fn saddle_metric() -> Metric2 {
        Metric2::new(
            ScalarField::analytic(dom(), |_, y| 1.0 + y * y),
            ScalarField::analytic(dom(), |x, y| x * y),
            ScalarField::analytic(dom(), |x, _| 1.0 + x * x),
        )
    }

    fn cos_metric() -> Metric2 {
        Metric2::warped(&ScalarField::analytic(dom(), |x, _| x.cos()))
    }

    #[test]
    fn flat_metric_has_no_christoffels_or_curvature() {
        let g = Metric2::flat(dom());
        let p = Point::new(0.1, -0.2);
        assert_eq!(christoffel(&g, p).unwrap().max_abs(), 0.0);
        assert_eq!(gaussian_curvature(&g, p).unwrap(), 0.0);
    }

    #[test]
    fn warped_metric_christoffels() {
        // Oracle: for dx² + G²dy², Γ¹₂₂ = −G G_x, Γ²₁₂ = G_x / G, others 0.
        let g = cos_metric();
        let p = Point::new(0.3, 0.1);
        let c = christoffel(&g, p).unwrap();
        let (gv, gx) = (0.3f64.cos(), -(0.3f64.sin()));
        assert!((c.get(1, 2, 2) + gv * gx).abs() < 1e-15);
        assert!((c.get(2, 1, 2) - gx / gv).abs() < 1e-15);
        assert!((c.get(2, 2, 1) - gx / gv).abs() < 1e-15);
        for (l, i, j) in [(1, 1, 1), (1, 1, 2), (2, 1, 1), (2, 2, 2)] {
            assert!(c.get(l, i, j).abs() < 1e-15);
        }
        assert!((gaussian_curvature(&g, p).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn saddle_christoffels_vanish_at_origin() {
        let c = christoffel(&saddle_metric(), Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn brioschi_agrees_with_riemann_route() {
        let g = saddle_metric();
        for p in dom().shrink(0.1).lattice(5) {
            let k1 = gaussian_curvature(&g, p).unwrap();
            let k2 = gaussian_curvature_brioschi(&g, p).unwrap();
            let exact = -1.0 / (1.0 + p.x * p.x + p.y * p.y).powi(2);
            assert!((k1 - exact).abs() < 1e-13, "{k1} vs {exact}");
            assert!((k2 - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn saddle_hessian_and_gradient() {
        let g = saddle_metric();
        let z = ScalarField::analytic(dom(), |x, y| x * y);
        for p in dom().shrink(0.05).lattice(4) {
            let h = covariant_hessian(&g, &z, p).unwrap();
            let w = 1.0 + p.x * p.x + p.y * p.y;
            assert!(h[0][0].abs() < 1e-15 && h[1][1].abs() < 1e-15);
            assert!((h[0][1] - 1.0 / w).abs() < 1e-15);
            let n = grad_norm_sq(&g, &z, p).unwrap();
            assert!((n - (w - 1.0) / w).abs() < 1e-15);
        }
    }

    #[test]
    fn b_tensor_examples() {
        let flat = Metric2::flat(dom());
        let para = ScalarField::analytic(dom(), |x, y| (x * x + y * y) * 0.5);
        let b = b_tensor(&flat, &para, Point::new(0.2, 0.1)).unwrap();
        assert_eq!(b.as_matrix(), [[1.0, 0.0], [0.0, 1.0]]);
        let hyp = ScalarField::analytic(dom(), |x, y| x * x - y * y);
        let b = b_tensor(&flat, &hyp, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(b.as_matrix(), [[-2.0, 0.0], [0.0, 2.0]]);
        let z = ScalarField::analytic(dom(), |x, y| x * y);
        let b = b_tensor(&saddle_metric(), &z, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(b.as_matrix(), [[0.0, -1.0], [-1.0, 0.0]]);
    }

    #[test]
    fn darboux_residual_examples() {
        let g = saddle_metric();
        let z = ScalarField::analytic(dom(), |x, y| x * y);
        let k = gaussian_curvature_field(&g);
        for p in dom().shrink(0.05).lattice(5) {
            assert!(darboux_residual(&g, &z, &k, p).unwrap().abs() < 1e-14);
        }
        let flat = Metric2::flat(dom());
        let para = ScalarField::analytic(dom(), |x, y| (x * x + y * y) * 0.5);
        let zero = ScalarField::constant(dom(), 0.0);
        assert_eq!(darboux_residual(&flat, &para, &zero, Point::new(0.1, 0.1)).unwrap(), 1.0);
    }

    #[test]
    fn flat_divergence_vanishes_for_polynomials() {
        let flat = Metric2::flat(dom());
        let z = ScalarField::analytic(dom(), |x, y| x * x * y);
        let (a, b) = b_divergence(&flat, &z, Point::new(0.2, -0.3)).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        let z = ScalarField::analytic(dom(), |x, y| x.sin() * y.cos());
        let (a, b) = divergence_identity_residual(&flat, &z, Point::new(0.2, -0.3)).unwrap();
        assert!(a.abs() < 1e-10 && b.abs() < 1e-10);
    }

    #[test]
    fn divergence_identity_on_curved_metrics() {
        let z = ScalarField::analytic(dom(), |x, y| x + y);
        let (a, b) = divergence_identity_residual(&cos_metric(), &z, Point::new(0.2, 0.1)).unwrap();
        assert!(a.abs() < 1e-8 && b.abs() < 1e-8);
        let z = ScalarField::analytic(dom(), |x, y| x * y);
        let (a, b) = divergence_identity_residual(&saddle_metric(), &z, Point::new(0.2, 0.1)).unwrap();
        assert!(a.abs() < 1e-8 && b.abs() < 1e-8);
    }

    #[test]
    fn trace_chi_and_contraction_identities() {
        let z = ScalarField::analytic(dom(), |x, y| (x - 2.0 * y).sin() + x * y * y);
        for g in [saddle_metric(), cos_metric()] {
            for p in dom().shrink(0.1).lattice(4) {
                let t = christoffel_trace_residual(&g, p).unwrap();
                let c = chi_identity_residual(&g, p).unwrap();
                assert!(t[0].abs() < 1e-13 && t[1].abs() < 1e-13);
                assert!(c[0].abs() < 1e-12 && c[1].abs() < 1e-12);
                assert!(b_contraction_residual(&g, &z, p).unwrap().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let g = Metric2::new(
            ScalarField::constant(dom(), 1.0),
            ScalarField::constant(dom(), 1.0),
            ScalarField::constant(dom(), 1.0),
        );
        assert!(matches!(christoffel(&g, Point::new(0.0, 0.0)), Err(Error::DegenerateMetric(_))));
    }

    #[test]
    fn transposed_metric_keeps_curvature() {
        let g = saddle_metric();
        let t = g.transposed();
        let p = Point::new(0.2, -0.1);
        let q = Point::new(-0.1, 0.2);
        assert!((gaussian_curvature(&g, p).unwrap() - gaussian_curvature(&t, q).unwrap()).abs() < 1e-14);
    }
}
