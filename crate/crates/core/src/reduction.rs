//! Characteristic coordinates that remove the mixed term of the Darboux
//! equation near a point `p` with `∇₂₂z(p) ≠ 0`, and the reduced linear
//! equation `∂ₜₜu + K∂ₛₛu = Kf` that results.
//!
//! The chart is `t = x − p¹` and `s = s(x, y)`, where `s` is constant along
//! the characteristics `dy/dx = b¹²/b¹¹` and `s(p¹, y) = c·y`; then
//! `b̄¹² = b¹¹∂ₓs + b¹²∂ᵧs = 0`. Everything after the chart is evaluated on
//! a regular `(t, s)` grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{Grid2D, Point, Rect, ScalarField};
use crate::geometry::{darboux_residual, grad_norm_sq, Metric2, PointGeometry};
use crate::ode::rk4_step;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReductionOptions {
    /// Spacing of the `(t, s)` grid; characteristic steps are `h/4`.
    pub h: f64,
    /// Initial half-width of the neighbourhood in `t`.
    pub half_width: f64,
    /// Largest `|darboux_residual(p)|` accepted as a solution.
    pub darboux_tol: f64,
    /// Round-trip tolerance of the inverse map.
    pub newton_tol: f64,
    /// Largest accepted condition number of `∂(t, s)/∂(x, y)`.
    pub max_cond: f64,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions { h: 0.005, half_width: 0.05, darboux_tol: 1e-6, newton_tol: 1e-10, max_cond: 10.0 }
    }
}

/// `(b¹¹, b¹², b²²)` at `q`.
fn b_at(g: &Metric2, z: &ScalarField, q: Point) -> Result<[f64; 3]> {
    let pg = PointGeometry::at(g, q, 1)?;
    let b = pg.b(&z.jet(q, 2)?);
    Ok([b[0][0].value(), b[0][1].value(), b[1][1].value()])
}

fn outside_to_characteristic(e: Error) -> Error {
    match e {
        Error::OutsideDomain(q) => Error::Characteristic(format!("characteristic leaves the domain at {q}")),
        other => other,
    }
}

/// `dy/dx = b¹²/b¹¹`.
fn slope(g: &Metric2, z: &ScalarField, q: Point) -> Result<f64> {
    let [b11, b12, _] = b_at(g, z, q).map_err(outside_to_characteristic)?;
    if b11 == 0.0 {
        return Err(Error::Characteristic(format!("b¹¹ vanishes at {q}")));
    }
    Ok(b12 / b11)
}

/// Nodes and data of the chart on its `(t, s)` grid.
#[derive(Clone, Debug)]
pub struct CoordinateChart {
    pub base: Point,
    pub c: f64,
    pub half_width: f64,
    /// Grid in `(t, s)`; the base point is the node `center`.
    pub grid: Grid2D,
    pub center: (usize, usize),
    /// `y(t, s)` sampled on the grid; `x = p¹ + t`.
    pub y: ScalarField,
    /// Largest `|s(x(t, s), y(t, s)) − s|` over the grid.
    pub round_trip: f64,
    /// Smallest `|b¹¹| / |b¹¹(p)|` over the grid.
    pub min_b11_ratio: f64,
    /// Largest condition number of `∂(t, s)/∂(x, y)` over the grid.
    pub max_cond: f64,
    steps: usize,
    g: Metric2,
    z: ScalarField,
}

impl CoordinateChart {
    /// `s(x, y)`: follows the characteristic through `q` back to `x = p¹`
    /// in a fixed number of RK4 steps, so `s` is smooth in `q`.
    pub fn s_of(&self, q: Point) -> Result<f64> {
        let rhs = |x: f64, y: [f64; 1]| Ok([slope(&self.g, &self.z, Point::new(x, y[0]))?]);
        let dx = (self.base.x - q.x) / self.steps as f64;
        let mut y = [q.y];
        for k in 0..self.steps {
            y = rk4_step(&rhs, q.x + k as f64 * dx, y, dx)?;
        }
        Ok(self.c * y[0])
    }

    pub fn forward(&self, q: Point) -> Result<Point> {
        Ok(Point::new(q.x - self.base.x, self.s_of(q)?))
    }

    /// `(x, y)` at a grid node.
    pub fn node_xy(&self, i: usize, j: usize) -> Result<Point> {
        let ts = self.grid.node(i, j);
        Ok(Point::new(self.base.x + ts.x, self.y.value(ts)?))
    }

    /// `(∂ₓs, ∂ᵧs)` by five-point differences of [`Self::s_of`].
    pub fn s_gradient(&self, q: Point) -> Result<(f64, f64)> {
        const D: f64 = 1e-3;
        let d = |dir: (f64, f64)| -> Result<f64> {
            let at = |k: f64| self.s_of(Point::new(q.x + k * D * dir.0, q.y + k * D * dir.1));
            Ok((at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * D))
        };
        Ok((d((1.0, 0.0))?, d((0.0, 1.0))?))
    }

    /// `|b¹¹∂ₓs + b¹²∂ᵧs|` at `q`.
    pub fn characteristic_residual(&self, q: Point) -> Result<f64> {
        let [b11, b12, _] = b_at(&self.g, &self.z, q)?;
        let (sx, sy) = self.s_gradient(q)?;
        Ok((b11 * sx + b12 * sy).abs())
    }

    /// Samples `f(x(t, s), y(t, s))` on the chart grid.
    pub fn pull(&self, f: &ScalarField) -> Result<ScalarField> {
        let values = self.grid.nodes().map(|(i, j, _)| f.value(self.node_xy(i, j)?)).collect::<Result<Vec<_>>>()?;
        ScalarField::sampled(self.grid, values)
    }

    /// `s` sampled on an `(x, y)` grid.
    pub fn s_field(&self, grid: Grid2D) -> Result<ScalarField> {
        let pts: Vec<Point> = grid.nodes().map(|(_, _, p)| p).collect();
        let values = pts.par_iter().map(|p| self.s_of(*p)).collect::<Result<Vec<_>>>()?;
        ScalarField::sampled(grid, values)
    }

    /// `(∂y/∂t, ∂y/∂s)` at a node, from the sampled inverse map.
    fn inverse_jacobian(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let jet = self.y.jet(self.grid.node(i, j), 1)?;
        Ok((jet.partial(1, 0), jet.partial(0, 1)))
    }
}

fn cond2(a: [[f64; 2]; 2]) -> f64 {
    let fro = a[0][0].powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + a[1][1].powi(2);
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
    if det == 0.0 {
        return f64::INFINITY;
    }
    // σ_max/σ_min from σ₁² + σ₂² = ‖A‖²_F and σ₁σ₂ = |det A|.
    let r = fro / det;
    0.5 * (r + (r * r - 4.0).max(0.0).sqrt())
}

/// Builds the chart around `p`, shrinking the neighbourhood until
/// `|b¹¹| >= ½|b¹¹(p)|` and `cond ∂(t, s)/∂(x, y) <= max_cond` hold at
/// every node.
pub fn solve_characteristic_coords(
    g: &Metric2,
    z: &ScalarField,
    p: Point,
    opts: &ReductionOptions,
) -> Result<CoordinateChart> {
    let [b11, _, _] = b_at(g, z, p)?;
    if b11.abs() < 1e-12 {
        return Err(Error::Precondition(format!("b¹¹(p) = {b11:e}: the line x = p¹ is characteristic")));
    }
    let grad = grad_norm_sq(g, z, p)?;
    if !(grad < 1.0) {
        return Err(Error::Precondition(format!("|∇_g z(p)|² = {grad} >= 1")));
    }
    let det_g = g.jets(p, 0)?.det.value();
    let c = b11 * det_g.sqrt() / (1.0 - grad).sqrt();

    let domain = g.domain().intersect(&z.domain());
    let room = (p.x - domain.x0).min(domain.x1 - p.x).min(p.y - domain.y0).min(domain.y1 - p.y);
    let min_half = 4.0 * opts.h;
    let mut half = opts.half_width.min(0.5 * room);
    let mut last_err = None;
    while half >= min_half {
        match build_chart(g, z, p, c, b11, half, opts) {
            Ok(chart) if chart.min_b11_ratio >= 0.5 && chart.max_cond <= opts.max_cond => return Ok(chart),
            Ok(chart) => {
                last_err = Some(Error::Characteristic(format!(
                    "neighbourhood of half-width {half} fails sizing: min |b¹¹| ratio {}, max cond {}",
                    chart.min_b11_ratio, chart.max_cond
                )))
            }
            Err(e @ (Error::Characteristic(_) | Error::OutsideDomain(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        half *= 0.75;
    }
    Err(last_err.unwrap_or_else(|| Error::Characteristic(format!("no room for a chart at spacing {}", opts.h))))
}

fn build_chart(
    g: &Metric2,
    z: &ScalarField,
    p: Point,
    c: f64,
    b11_p: f64,
    half: f64,
    opts: &ReductionOptions,
) -> Result<CoordinateChart> {
    let h = opts.h;
    let nt_half = (half / h).floor().max(4.0) as usize;
    let ns_half = (c.abs() * half / h).floor().max(4.0) as usize;
    let s_p = c * p.y;
    let grid =
        Grid2D::new(Point::new(-(nt_half as f64) * h, s_p - ns_half as f64 * h), h, 2 * nt_half + 1, 2 * ns_half + 1)?;
    let t_max = nt_half as f64 * h;
    let steps = (t_max / (0.25 * h)).ceil() as usize;
    let mut chart = CoordinateChart {
        base: p,
        c,
        half_width: t_max,
        grid,
        center: (nt_half, ns_half),
        y: ScalarField::constant(grid.rect(), 0.0),
        round_trip: 0.0,
        min_b11_ratio: 0.0,
        max_cond: 0.0,
        steps,
        g: g.clone(),
        z: z.clone(),
    };

    // March each characteristic from the initial line across the t nodes,
    // four RK4 substeps per node, then polish by Newton on s(x, ·).
    let rhs = |x: f64, y: [f64; 1]| Ok([slope(g, z, Point::new(x, y[0]))?]);
    let columns: Vec<(Vec<f64>, f64)> = (0..grid.ny)
        .into_par_iter()
        .map(|j| -> Result<(Vec<f64>, f64)> {
            let s = grid.y(j);
            let mut col = vec![0.0; grid.nx];
            col[nt_half] = s / c;
            for dir in [1.0f64, -1.0] {
                let mut y = [s / c];
                let mut x = p.x;
                for k in 1..=nt_half {
                    for _ in 0..4 {
                        y = rk4_step(&rhs, x, y, dir * 0.25 * h)?;
                        x += dir * 0.25 * h;
                    }
                    x = p.x + dir * k as f64 * h;
                    let i = if dir > 0.0 { nt_half + k } else { nt_half - k };
                    col[i] = y[0];
                }
            }
            let mut worst = 0.0f64;
            for (i, yv) in col.iter_mut().enumerate() {
                let x = p.x + grid.x(i);
                let (y, r) = newton_polish(&chart, x, *yv, s, opts.newton_tol)?;
                *yv = y;
                worst = worst.max(r);
            }
            Ok((col, worst))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; grid.len()];
    for (j, (col, worst)) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            values[j * grid.nx + i] = *v;
        }
        chart.round_trip = chart.round_trip.max(*worst);
    }
    chart.y = ScalarField::sampled(grid, values)?;

    let mut min_ratio = f64::INFINITY;
    let mut max_cond = 0.0f64;
    for (i, j, _) in grid.nodes() {
        let q = chart.node_xy(i, j)?;
        let [b11, b12, _] = b_at(g, z, q)?;
        min_ratio = min_ratio.min(b11.abs() / b11_p.abs());
        let (_, ys) = chart.inverse_jacobian(i, j)?;
        let sy = 1.0 / ys;
        let sx = -(b12 / b11) * sy;
        max_cond = max_cond.max(cond2([[1.0, 0.0], [sx, sy]]));
    }
    chart.min_b11_ratio = min_ratio;
    chart.max_cond = max_cond;
    Ok(chart)
}

/// Solves `s(x, y) = s` for `y` starting from `y0`; returns `y` and the
/// final residual.
fn newton_polish(chart: &CoordinateChart, x: f64, y0: f64, s: f64, tol: f64) -> Result<(f64, f64)> {
    const D: f64 = 1e-6;
    let mut y = y0;
    for _ in 0..12 {
        let r = chart.s_of(Point::new(x, y))? - s;
        if r.abs() < tol {
            return Ok((y, r.abs()));
        }
        let dsdy = (chart.s_of(Point::new(x, y + D))? - chart.s_of(Point::new(x, y - D))?) / (2.0 * D);
        y -= r / dsdy;
    }
    Err(Error::NewtonFailed(Point::new(x - chart.base.x, s)))
}

/// Components of `b̄ⁱʲ` on the chart grid.
#[derive(Clone, Debug)]
pub struct TransformedB {
    pub b11: ScalarField,
    pub b12: ScalarField,
    pub b22: ScalarField,
    /// `(|g|b¹¹)⁻¹(∂ᵧs)²K(1 − |∇_g z|²)`.
    pub b22_closed: ScalarField,
    /// `max|b̄¹²| / max|b|`.
    pub b12_rel: f64,
    /// `max|b̄²² − closed form| / max|closed form|`.
    pub b22_rel: f64,
}

/// `b̄ⁱʲ = bˡᵐ ∂x̄ⁱ/∂xˡ ∂x̄ʲ/∂xᵐ` with `∂(t, s)/∂(x, y)` taken from the
/// sampled inverse map.
pub fn transform_b(g: &Metric2, z: &ScalarField, k: &ScalarField, chart: &CoordinateChart) -> Result<TransformedB> {
    let grid = chart.grid;
    let n = grid.len();
    let (mut t11, mut t12, mut t22, mut closed) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut max_b = 0.0f64;
    for (i, j, _) in grid.nodes() {
        let idx = j * grid.nx + i;
        let q = chart.node_xy(i, j)?;
        let [b11, b12, b22] = b_at(g, z, q)?;
        max_b = max_b.max(b11.abs()).max(b12.abs()).max(b22.abs());
        let (yt, ys) = chart.inverse_jacobian(i, j)?;
        let sy = 1.0 / ys;
        let sx = -yt * sy;
        t11[idx] = b11;
        t12[idx] = b11 * sx + b12 * sy;
        t22[idx] = b11 * sx * sx + 2.0 * b12 * sx * sy + b22 * sy * sy;
        let det_g = g.jets(q, 0)?.det.value();
        closed[idx] = sy * sy * k.value(q)? * (1.0 - grad_norm_sq(g, z, q)?) / (det_g * b11);
    }
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let b12_rel = max_abs(&t12) / max_b;
    let diff: Vec<f64> = t22.iter().zip(&closed).map(|(a, b)| a - b).collect();
    let scale = max_abs(&closed);
    let b22_rel = if scale > 0.0 { max_abs(&diff) / scale } else { max_abs(&diff) };
    Ok(TransformedB {
        b11: ScalarField::sampled(grid, t11)?,
        b12: ScalarField::sampled(grid, t12)?,
        b22: ScalarField::sampled(grid, t22)?,
        b22_closed: ScalarField::sampled(grid, closed)?,
        b12_rel,
        b22_rel,
    })
}

/// `ḡᵢⱼ = gₗₘ ∂xˡ/∂x̄ⁱ ∂xᵐ/∂x̄ʲ`, sampled on the chart grid, using
/// `∂y/∂t = b¹²/b¹¹` along characteristics and `∂y/∂s` from the inverse map.
pub fn pullback_metric(g: &Metric2, chart: &CoordinateChart) -> Result<Metric2> {
    let grid = chart.grid;
    let n = grid.len();
    let (mut a, mut b, mut d) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (i, j, _) in grid.nodes() {
        let idx = j * grid.nx + i;
        let q = chart.node_xy(i, j)?;
        let m = g.at(q)?;
        let yt = slope(&chart.g, &chart.z, q)?;
        let (_, ys) = chart.inverse_jacobian(i, j)?;
        a[idx] = m[0][0] + 2.0 * m[0][1] * yt + m[1][1] * yt * yt;
        b[idx] = (m[0][1] + m[1][1] * yt) * ys;
        d[idx] = m[1][1] * ys * ys;
    }
    Ok(Metric2::new(ScalarField::sampled(grid, a)?, ScalarField::sampled(grid, b)?, ScalarField::sampled(grid, d)?))
}

/// Cumulative integral from index 0: composite Simpson at even nodes, and
/// at odd nodes Simpson up to the previous node plus a one-interval cubic
/// rule, so the odd and even errors agree to `O(h⁵)`.
fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for k in (2..n).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    for k in (1..n).step_by(2) {
        let last = if k + 2 < n {
            h / 24.0 * (9.0 * f[k - 1] + 19.0 * f[k] - 5.0 * f[k + 1] + f[k + 2])
        } else {
            h / 24.0 * (f[k - 3] - 5.0 * f[k - 2] + 19.0 * f[k - 1] + 9.0 * f[k])
        };
        out[k] = out[k - 1] + last;
    }
    out
}

/// `∫_{t_c}^{t} f` along one line of samples, both directions from `center`.
fn cumulative_from(f: &[f64], center: usize, h: f64) -> Vec<f64> {
    let fwd = cumulative_simpson(&f[center..], h);
    let back_in: Vec<f64> = f[..=center].iter().rev().copied().collect();
    let back = cumulative_simpson(&back_in, -h);
    let mut out = vec![0.0; f.len()];
    for (k, v) in fwd.iter().enumerate() {
        out[center + k] = *v;
    }
    for (k, v) in back.iter().enumerate() {
        out[center - k] = *v;
    }
    out
}

/// `u = z − ∫₀ᵗ∫₀^{t′}(Γ̄¹₁₁∂ₜz + Γ̄²₁₁∂ₛz) dt″ dt′`, iterated Simpson in `t`
/// on every `s`-line of the grid.
pub fn build_u(zbar: &ScalarField, gbar: &Metric2, grid: &Grid2D, t_center: usize) -> Result<ScalarField> {
    let mut integrand = vec![0.0; grid.len()];
    for (i, j, q) in grid.nodes() {
        let pg = PointGeometry::at(gbar, q, 1)?;
        let zj = zbar.jet(q, 1)?;
        integrand[j * grid.nx + i] =
            pg.gamma[0][0][0].value() * zj.partial(1, 0) + pg.gamma[1][0][0].value() * zj.partial(0, 1);
    }
    let mut u = vec![0.0; grid.len()];
    for j in 0..grid.ny {
        let row = &integrand[j * grid.nx..(j + 1) * grid.nx];
        let inner = cumulative_from(row, t_center, grid.h);
        let outer = cumulative_from(&inner, t_center, grid.h);
        for i in 0..grid.nx {
            let q = grid.node(i, j);
            u[j * grid.nx + i] = zbar.value(q)? - outer[i];
        }
    }
    ScalarField::sampled(*grid, u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub point: Point,
    pub h: f64,
    pub half_width: f64,
    pub c: f64,
    pub b11_p: f64,
    /// `(b¹¹)⁻¹f̄(p)`.
    pub fbar_ratio: f64,
    /// `max|∂ₜₜu + K∂ₛₛu − Kf|` over the grid.
    pub max_eq3_residual: f64,
    /// The same residual with `f̄(p) − f̄` in place of `b¹¹ − f̄`.
    pub max_literal_f_residual: f64,
    /// `max|∂ₜₜu − ∇̄₁₁z|`.
    pub max_utt_residual: f64,
    /// `max|b¹¹∂ₓs + b¹²∂ᵧs| / max|b|` at a lattice of chart points.
    pub characteristic_rel: f64,
    pub b12_rel: f64,
    pub b22_rel: f64,
    pub round_trip: f64,
    pub f_at_p: f64,
    pub min_f: f64,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub report: ReductionReport,
    pub chart: CoordinateChart,
    pub gbar: Metric2,
    pub zbar: ScalarField,
    pub u: ScalarField,
    pub f: ScalarField,
}

/// Points per axis at which the characteristic equation is checked with
/// differences of the forward map.
const CHARACTERISTIC_SAMPLES: usize = 5;

/// Runs the whole reduction at `p` and evaluates the reduced equation on
/// the chart grid.
pub fn reduced_equation_residual(
    g: &Metric2,
    z: &ScalarField,
    k: &ScalarField,
    p: Point,
    opts: &ReductionOptions,
) -> Result<Reduction> {
    let dr = darboux_residual(g, z, k, p)?;
    if !(dr.abs() <= opts.darboux_tol) {
        return Err(Error::Precondition(format!("z does not solve the Darboux equation at p: residual {dr:e}")));
    }
    let chart = solve_characteristic_coords(g, z, p, opts)?;
    let grid = chart.grid;
    let tb = transform_b(g, z, k, &chart)?;
    let gbar = pullback_metric(g, &chart)?;
    let zbar = chart.pull(z)?;
    let u = build_u(&zbar, &gbar, &grid, chart.center.0)?;

    let b11_p = b_at(g, z, p)?[0];
    let mut characteristic = 0.0f64;
    let mut max_b = 0.0f64;
    let inner = Rect::new(
        p.x - 0.5 * chart.half_width,
        p.x + 0.5 * chart.half_width,
        p.y - 0.25 * chart.half_width,
        p.y + 0.25 * chart.half_width,
    );
    for q in inner.lattice(CHARACTERISTIC_SAMPLES) {
        characteristic = characteristic.max(chart.characteristic_residual(q)?);
        let b = b_at(g, z, q)?;
        max_b = max_b.max(b[0].abs()).max(b[1].abs()).max(b[2].abs());
    }

    struct NodeData {
        fbar: f64,
        b11: f64,
        omega: f64,
        k: f64,
        nabla22: f64,
        nabla11: f64,
        gamma_terms: f64,
        zss: f64,
        utt: f64,
        uss: f64,
    }
    let mut data = Vec::with_capacity(grid.len());
    for (i, j, ts) in grid.nodes() {
        let q = chart.node_xy(i, j)?;
        let [b11, _, _] = b_at(g, z, q)?;
        let omega = 1.0 - grad_norm_sq(g, z, q)?;
        let det_g = g.jets(q, 0)?.det.value();
        let (_, ys) = chart.inverse_jacobian(i, j)?;
        let sy = 1.0 / ys;
        let pg = PointGeometry::at(&gbar, ts, 1)?;
        let zj = zbar.jet(ts, 2)?;
        let hess = pg.hessian(&zj);
        let uj = u.jet(ts, 2)?;
        let gm = &pg.gamma;
        data.push(NodeData {
            fbar: sy * sy * omega / (det_g * b11),
            b11,
            omega,
            k: k.value(q)?,
            nabla22: hess[1][1].value(),
            nabla11: hess[0][0].value(),
            gamma_terms: gm[0][1][1].value() * zj.partial(1, 0) + gm[1][1][1].value() * zj.partial(0, 1),
            zss: zj.partial(0, 2),
            utt: uj.partial(2, 0),
            uss: uj.partial(0, 2),
        });
    }
    let fbar_p = data[chart.center.1 * grid.nx + chart.center.0].fbar;
    let mut f_vals = Vec::with_capacity(grid.len());
    let (mut res, mut res_lit, mut res_utt) = (0.0f64, 0.0f64, 0.0f64);
    for d in &data {
        let tail = d.gamma_terms + d.uss - d.zss;
        let f = (2.0 * d.omega + (d.b11 - d.fbar) * d.nabla22) / d.b11 + tail;
        let f_lit = (2.0 * d.omega + (fbar_p - d.fbar) * d.nabla22) / d.b11 + tail;
        let lhs = d.utt + d.k * d.uss;
        res = res.max((lhs - d.k * f).abs());
        res_lit = res_lit.max((lhs - d.k * f_lit).abs());
        res_utt = res_utt.max((d.utt - d.nabla11).abs());
        f_vals.push(f);
    }
    let f_at_p = f_vals[chart.center.1 * grid.nx + chart.center.0];
    let min_f = f_vals.iter().copied().fold(f64::INFINITY, f64::min);
    let report = ReductionReport {
        point: p,
        h: opts.h,
        half_width: chart.half_width,
        c: chart.c,
        b11_p,
        fbar_ratio: fbar_p / b11_p,
        max_eq3_residual: res,
        max_literal_f_residual: res_lit,
        max_utt_residual: res_utt,
        characteristic_rel: characteristic / max_b,
        b12_rel: tb.b12_rel,
        b22_rel: tb.b22_rel,
        round_trip: chart.round_trip,
        f_at_p,
        min_f,
    };
    let f = ScalarField::sampled(grid, f_vals)?;
    Ok(Reduction { report, chart, gbar, zbar, u, f })
}

/// The same pipeline for a point on a horizontal side: the roles of `x`
/// and `y` are exchanged on input, so the chart is `t = y − p²`.
pub fn reduced_equation_residual_transposed(
    g: &Metric2,
    z: &ScalarField,
    k: &ScalarField,
    p: Point,
    opts: &ReductionOptions,
) -> Result<Reduction> {
    reduced_equation_residual(&g.transposed(), &z.transposed(), &k.transposed(), Point::new(p.y, p.x), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> (Rect, Metric2) {
        let d = Rect::new(-1.0, 1.0, -1.0, 1.0);
        (d, Metric2::flat(d))
    }

    #[test]
    fn horizontal_characteristics() {
        let (d, g) = flat();
        let z = ScalarField::analytic(d, |x, y| (x * x + y * y) * 0.5);
        let chart = solve_characteristic_coords(&g, &z, Point::new(0.0, 0.0), &ReductionOptions::default()).unwrap();
        assert_eq!(chart.c, 1.0);
        let q = Point::new(0.03, -0.02);
        assert!((chart.s_of(q).unwrap() - q.y).abs() < 1e-15);
        let k = ScalarField::constant(d, 0.0);
        let tb = transform_b(&g, &z, &k, &chart).unwrap();
        for (_, _, ts) in chart.grid.nodes() {
            assert!((tb.b11.value(ts).unwrap() - 1.0).abs() < 1e-12);
            assert!(tb.b12.value(ts).unwrap().abs() < 1e-12);
            assert!((tb.b22.value(ts).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tilted_characteristics() {
        let (d, g) = flat();
        let z = ScalarField::analytic(d, |x, y| y * y * 0.5 + x * y);
        let chart = solve_characteristic_coords(&g, &z, Point::new(0.0, 0.0), &ReductionOptions::default()).unwrap();
        assert_eq!(chart.c, 1.0);
        let q = Point::new(0.02, 0.01);
        assert!((chart.s_of(q).unwrap() - (q.x + q.y)).abs() < 1e-14);
        assert!(chart.characteristic_residual(q).unwrap() < 1e-12);
        let gbar = pullback_metric(&g, &chart).unwrap();
        let m = gbar.at(Point::new(0.01, 0.0)).unwrap();
        assert!((m[0][0] - 2.0).abs() < 1e-12 && (m[0][1] + 1.0).abs() < 1e-12 && (m[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_pullback_keeps_u_equal_to_z() {
        let (d, g) = flat();
        let z = ScalarField::analytic(d, |x, y| (x * x + y * y) * 0.5);
        let chart = solve_characteristic_coords(&g, &z, Point::new(0.0, 0.0), &ReductionOptions::default()).unwrap();
        let gbar = pullback_metric(&g, &chart).unwrap();
        let zbar = chart.pull(&z).unwrap();
        let u = build_u(&zbar, &gbar, &chart.grid, chart.center.0).unwrap();
        for (_, _, ts) in chart.grid.nodes() {
            assert!((u.value(ts).unwrap() - zbar.value(ts).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn characteristic_line_is_rejected() {
        let (d, g) = flat();
        let z = ScalarField::analytic(d, |x, _| x * x);
        assert!(matches!(
            solve_characteristic_coords(&g, &z, Point::new(0.0, 0.0), &ReductionOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cumulative_simpson_is_exact_for_cubics() {
        let h = 0.1;
        let f: Vec<f64> = (0..9).map(|k| (k as f64 * h).powi(3)).collect();
        let out = cumulative_simpson(&f, h);
        for (k, v) in out.iter().enumerate() {
            assert!((v - (k as f64 * h).powi(4) / 4.0).abs() < 1e-15, "{k}");
        }
        let both = cumulative_from(&f, 4, h);
        for (k, v) in both.iter().enumerate() {
            let t = k as f64 * h;
            assert!((v - (t.powi(4) - 0.4f64.powi(4)) / 4.0).abs() < 1e-15, "{k}");
        }
    }
}
