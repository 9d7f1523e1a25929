//! Grids, scalar fields with derivative access, and quadrature.
//!
//! A [`ScalarField`] is either *analytic*, backed by a closure that returns a
//! Taylor [`Jet`] at any point (exact partials), or *sampled*, backed by
//! values on a uniform [`Grid2D`] and differentiated with order-4 finite
//! difference stencils.

mod csv_io;
pub mod quadrature;
mod stencil;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_DEG};

pub use csv_io::{parse_field_csv, write_columns_csv, write_field_csv};
pub use quadrature::{
    gauss_legendre, integrate_boundary, integrate_boundary_with, integrate_rect, integrate_rect_with, Side,
    DEFAULT_CELLS, DEFAULT_ORDER,
};
pub use stencil::fd_weights;

/// Highest derivative order exposed through [`ScalarField::derivative`].
pub const MAX_DERIVATIVE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn square(center: Point, half_width: f64) -> Self {
        Rect::new(center.x - half_width, center.x + half_width, center.y - half_width, center.y + half_width)
    }

    /// A rectangle that contains every point of the plane.
    pub const fn everywhere() -> Self {
        Rect::new(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn is_empty(&self) -> bool {
        !(self.x1 > self.x0 && self.y1 > self.y0)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, p: Point) -> bool {
        const SLACK: f64 = 1e-12;
        let sx = SLACK * (1.0 + self.x0.abs().max(self.x1.abs()).min(1e6));
        let sy = SLACK * (1.0 + self.y0.abs().max(self.y1.abs()).min(1e6));
        p.x >= self.x0 - sx && p.x <= self.x1 + sx && p.y >= self.y0 - sy && p.y <= self.y1 + sy
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(Point::new(other.x0, other.y0)) && self.contains(Point::new(other.x1, other.y1))
    }

    pub fn intersect(&self, other: &Rect) -> Rect {
        Rect::new(self.x0.max(other.x0), self.x1.min(other.x1), self.y0.max(other.y0), self.y1.min(other.y1))
    }

    /// Shrinks every side inward by `margin`.
    pub fn shrink(&self, margin: f64) -> Rect {
        Rect::new(self.x0 + margin, self.x1 - margin, self.y0 + margin, self.y1 - margin)
    }

    /// `n × n` regularly spaced points including the corners.
    pub fn lattice(&self, n: usize) -> Vec<Point> {
        let mut pts = Vec::with_capacity(n * n);
        let step = |a: f64, b: f64, k: usize| {
            if n == 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        for j in 0..n {
            for i in 0..n {
                pts.push(Point::new(step(self.x0, self.x1, i), step(self.y0, self.y1, j)));
            }
        }
        pts
    }
}

/// Uniform grid with spacing `h` on both axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    /// Smallest sample count per axis; leaves room for order-4 stencils of
    /// fourth derivatives.
    pub const MIN_NODES: usize = 9;

    pub fn new(origin: Point, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if nx < Self::MIN_NODES || ny < Self::MIN_NODES {
            return Err(Error::InvalidGrid(format!("need at least {} nodes per axis, got {nx}×{ny}", Self::MIN_NODES)));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Grid2D { origin, h, nx, ny })
    }

    /// Largest grid with spacing `h` anchored at the lower-left corner of
    /// `rect` and contained in it.
    pub fn covering(rect: &Rect, h: f64) -> Result<Self> {
        if rect.is_empty() {
            return Err(Error::EmptyRect);
        }
        let nx = (rect.width() / h + 1e-9).floor() as usize + 1;
        let ny = (rect.height() / h + 1e-9).floor() as usize + 1;
        Grid2D::new(Point::new(rect.x0, rect.y0), h, nx, ny)
    }

    /// Grid with spacing `h` that has `center` as a node and extends
    /// `half_nodes` nodes to each side.
    pub fn centered(center: Point, h: f64, half_nodes_x: usize, half_nodes_y: usize) -> Result<Self> {
        Grid2D::new(
            Point::new(center.x - half_nodes_x as f64 * h, center.y - half_nodes_y as f64 * h),
            h,
            2 * half_nodes_x + 1,
            2 * half_nodes_y + 1,
        )
    }

    /// Largest grid with spacing `h` inside `rect` that has `anchor` as a
    /// node; also returns the anchor's indices.
    pub fn anchored(rect: &Rect, anchor: Point, h: f64) -> Result<(Self, (usize, usize))> {
        if rect.is_empty() {
            return Err(Error::EmptyRect);
        }
        if !rect.contains(anchor) || !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("anchor {anchor} must lie in the rectangle")));
        }
        let count = |d: f64| (d.max(0.0) / h + 1e-9).floor() as usize;
        let (left, right) = (count(anchor.x - rect.x0), count(rect.x1 - anchor.x));
        let (below, above) = (count(anchor.y - rect.y0), count(rect.y1 - anchor.y));
        let origin = Point::new(anchor.x - left as f64 * h, anchor.y - below as f64 * h);
        let grid = Grid2D::new(origin, h, left + right + 1, below + above + 1)?;
        Ok((grid, (left, below)))
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin.x + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin.y + j as f64 * self.h
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(self.x(i), self.y(j))
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x(0), self.x(self.nx - 1), self.y(0), self.y(self.ny - 1))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major node iterator (`y` outer, `x` inner).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, Point)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (i, j, self.node(i, j))))
    }
}

/// Values on a [`Grid2D`], stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGrid {
    grid: Grid2D,
    values: Vec<f64>,
}

impl SampledGrid {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(SampledGrid { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    fn jet(&self, p: Point, deg: usize) -> Result<Jet> {
        let g = &self.grid;
        let wx: Vec<(usize, Vec<f64>)> =
            (0..=deg).map(|m| stencil::axis_weights(g.origin.x, g.h, g.nx, p.x, m)).collect();
        let wy: Vec<(usize, Vec<f64>)> =
            (0..=deg).map(|m| stencil::axis_weights(g.origin.y, g.h, g.ny, p.y, m)).collect();
        Ok(Jet::from_partials(deg, |a, b| {
            let (ix, ref cx) = wx[a];
            let (iy, ref cy) = wy[b];
            let mut acc = 0.0;
            for (dj, wyj) in cy.iter().enumerate() {
                let row = (iy + dj) * g.nx;
                let mut inner = 0.0;
                for (di, wxi) in cx.iter().enumerate() {
                    inner += wxi * self.values[row + ix + di];
                }
                acc += wyj * inner;
            }
            acc
        }))
    }
}

type JetFn = dyn Fn(Point, usize) -> Result<Jet> + Send + Sync;

#[derive(Clone)]
pub enum Backing {
    /// Closed-form: exact Taylor jets at any point.
    Analytic(Arc<JetFn>),
    Sampled(Arc<SampledGrid>),
}

/// Real-valued function on a rectangle with partial derivatives up to
/// order 4 (sampled) or [`MAX_DEG`] (analytic, used internally).
#[derive(Clone)]
pub struct ScalarField {
    domain: Rect,
    backing: Backing,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.backing {
            Backing::Analytic(_) => "analytic".to_string(),
            Backing::Sampled(s) => format!("sampled {}×{} h={}", s.grid.nx, s.grid.ny, s.grid.h),
        };
        f.debug_struct("ScalarField").field("domain", &self.domain).field("backing", &kind).finish()
    }
}

impl ScalarField {
    /// Closed-form field from an expression in the coordinate jets.
    pub fn analytic<F>(domain: Rect, f: F) -> Self
    where
        F: Fn(Jet, Jet) -> Jet + Send + Sync + 'static,
    {
        ScalarField {
            domain,
            backing: Backing::Analytic(Arc::new(move |p: Point, deg| {
                let (x, y) = Jet::vars(p.x, p.y, deg);
                Ok(f(x, y))
            })),
        }
    }

    /// Field whose jets are produced by an arbitrary (possibly fallible)
    /// routine; used to compose fields.
    pub fn from_jet_fn<F>(domain: Rect, f: F) -> Self
    where
        F: Fn(Point, usize) -> Result<Jet> + Send + Sync + 'static,
    {
        ScalarField { domain, backing: Backing::Analytic(Arc::new(f)) }
    }

    pub fn constant(domain: Rect, v: f64) -> Self {
        ScalarField::analytic(domain, move |x, _| Jet::constant(v, x.deg()))
    }

    pub fn sampled(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        let s = SampledGrid::new(grid, values)?;
        Ok(ScalarField { domain: grid.rect(), backing: Backing::Sampled(Arc::new(s)) })
    }

    /// Samples this field's values on `grid`, producing a finite-difference
    /// backed copy.
    pub fn resample(&self, grid: Grid2D) -> Result<Self> {
        let values = grid.nodes().map(|(_, _, p)| self.value(p)).collect::<Result<Vec<_>>>()?;
        ScalarField::sampled(grid, values)
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.backing, Backing::Sampled(_))
    }

    /// Largest jet degree this field can produce.
    pub fn max_degree(&self) -> usize {
        match self.backing {
            Backing::Analytic(_) => MAX_DEG,
            Backing::Sampled(_) => MAX_DERIVATIVE,
        }
    }

    /// Restricts the declared domain (values are unchanged).
    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    pub fn jet(&self, p: Point, deg: usize) -> Result<Jet> {
        if !self.domain.contains(p) {
            return Err(Error::OutsideDomain(p));
        }
        if deg > self.max_degree() {
            return Err(Error::OrderTooHigh { requested: deg, max: self.max_degree() });
        }
        match &self.backing {
            Backing::Analytic(f) => f(p, deg),
            Backing::Sampled(s) => s.jet(p, deg),
        }
    }

    pub fn value(&self, p: Point) -> Result<f64> {
        Ok(self.jet(p, 0)?.value())
    }

    /// `∂ₓᵃ∂ᵧᵇ f(p)` for `a + b <= 4`.
    pub fn derivative(&self, alpha: (usize, usize), p: Point) -> Result<f64> {
        let order = alpha.0 + alpha.1;
        if order > MAX_DERIVATIVE {
            return Err(Error::OrderTooHigh { requested: order, max: MAX_DERIVATIVE });
        }
        Ok(self.jet(p, order)?.partial(alpha.0, alpha.1))
    }

    /// Pointwise combination of several fields through their jets. The
    /// domain is the intersection of the inputs' domains.
    pub fn combine<F>(fields: &[ScalarField], f: F) -> ScalarField
    where
        F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    {
        let domain = fields.iter().fold(Rect::everywhere(), |d, g| d.intersect(&g.domain));
        let inputs: Vec<ScalarField> = fields.to_vec();
        ScalarField::from_jet_fn(domain, move |p, deg| {
            let jets = inputs.iter().map(|g| g.jet(p, deg)).collect::<Result<Vec<_>>>()?;
            Ok(f(&jets))
        })
    }

    /// `f(y, x)`: the field with its coordinates exchanged.
    pub fn transposed(&self) -> ScalarField {
        let inner = self.clone();
        let d = self.domain;
        ScalarField::from_jet_fn(Rect::new(d.y0, d.y1, d.x0, d.x1), move |p, deg| {
            let j = inner.jet(Point::new(p.y, p.x), deg)?;
            Ok(Jet::from_partials(deg, |a, b| j.partial(b, a)))
        })
    }
}
