//! Composite tensor-product Gauss–Legendre quadrature on rectangles and
//! their boundaries.

use serde::{Deserialize, Serialize};

use super::{Point, Rect, ScalarField};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 8;
pub const DEFAULT_CELLS: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    if order == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// One of the four sides of a rectangle, with its Euclidean outer normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
    Top,
    Bottom,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Right, Side::Left, Side::Top, Side::Bottom];

    pub fn normal(self) -> (f64, f64) {
        match self {
            Side::Right => (1.0, 0.0),
            Side::Left => (-1.0, 0.0),
            Side::Top => (0.0, 1.0),
            Side::Bottom => (0.0, -1.0),
        }
    }

    /// Endpoints of this side of `rect`.
    pub fn segment(self, rect: &Rect) -> (Point, Point) {
        match self {
            Side::Right => (Point::new(rect.x1, rect.y0), Point::new(rect.x1, rect.y1)),
            Side::Left => (Point::new(rect.x0, rect.y0), Point::new(rect.x0, rect.y1)),
            Side::Top => (Point::new(rect.x0, rect.y1), Point::new(rect.x1, rect.y1)),
            Side::Bottom => (Point::new(rect.x0, rect.y0), Point::new(rect.x1, rect.y0)),
        }
    }
}

/// `∫∫_rect f dx dy` with `order` nodes per cell per axis on a
/// `cells × cells` subdivision.
pub fn integrate_rect_with<F>(rect: &Rect, order: usize, cells: usize, f: F) -> Result<f64>
where
    F: Fn(Point) -> Result<f64>,
{
    if rect.is_empty() || order == 0 || cells == 0 {
        return Err(Error::EmptyRect);
    }
    let (nodes, weights) = gauss_legendre(order);
    let hx = rect.width() / cells as f64;
    let hy = rect.height() / cells as f64;
    let mut total = 0.0;
    for cy in 0..cells {
        let yc = rect.y0 + (cy as f64 + 0.5) * hy;
        for cx in 0..cells {
            let xc = rect.x0 + (cx as f64 + 0.5) * hx;
            let mut cell = 0.0;
            for (ny, wy) in nodes.iter().zip(&weights) {
                for (nx, wx) in nodes.iter().zip(&weights) {
                    cell += wx * wy * f(Point::new(xc + 0.5 * hx * nx, yc + 0.5 * hy * ny))?;
                }
            }
            total += cell * 0.25 * hx * hy;
        }
    }
    Ok(total)
}

pub fn integrate_rect(f: &ScalarField, rect: &Rect, order: usize) -> Result<f64> {
    integrate_rect_with(rect, order, DEFAULT_CELLS, |p| f.value(p))
}

/// `∮ f dσ` over the boundary of `rect` with Euclidean length element; the
/// integrand sees which side it is evaluated on.
pub fn integrate_boundary_with<F>(rect: &Rect, order: usize, cells: usize, f: F) -> Result<f64>
where
    F: Fn(Side, Point) -> Result<f64>,
{
    if rect.is_empty() || order == 0 || cells == 0 {
        return Err(Error::EmptyRect);
    }
    let (nodes, weights) = gauss_legendre(order);
    let mut total = 0.0;
    for side in Side::ALL {
        let (a, b) = side.segment(rect);
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        let hl = 1.0 / cells as f64;
        let mut acc = 0.0;
        for c in 0..cells {
            let mid = (c as f64 + 0.5) * hl;
            for (n, w) in nodes.iter().zip(&weights) {
                let s = mid + 0.5 * hl * n;
                acc += w * f(side, Point::new(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)))?;
            }
        }
        total += acc * 0.5 * hl * len;
    }
    Ok(total)
}

/// Boundary integral with one integrand per side, in [`Side::ALL`] order
/// (right, left, top, bottom).
pub fn integrate_boundary(f_per_side: [&ScalarField; 4], rect: &Rect, order: usize) -> Result<f64> {
    integrate_boundary_with(rect, order, DEFAULT_CELLS, |side, p| {
        let k = Side::ALL.iter().position(|s| *s == side).unwrap();
        f_per_side[k].value(p)
    })
}
