//! `curvature build`: materializes `K`, certifies each bump and dumps the
//! field.

use std::path::Path;

use darboux_core::curvature::{CurvatureConfig, CurvatureSpec, Region, SquareFamily};
use darboux_core::{Grid2D, Rect};
use serde::Serialize;

use super::{dump_field, finish, DynResult};
use crate::report::{Bound, Check, Report};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub curvature: CurvatureConfig,
    /// Highest derivative order certified.
    pub k: usize,
    /// Spacing of the `K` dump.
    pub h: f64,
    /// Lattice points per axis for the sign checks.
    pub samples: usize,
}

impl Config {
    pub fn new(curvature: CurvatureConfig) -> Self {
        Config { curvature, k: 4, h: 0.005, samples: 41 }
    }
}

pub fn run(cfg: &Config, out: Option<&Path>) -> Report {
    let mut checks = Vec::new();
    let outcome = body(cfg, out, &mut checks);
    finish("curvature build", cfg, checks, outcome)
}

/// Bounding box of `∪ X₁ⁿ`, padded.
pub fn support_box() -> Rect {
    let w = SquareFamily::outer_half_width(1);
    Rect::new(0.0, 1.0 + 2.0 * w, -2.0 * w, 2.0 * w)
}

fn body(cfg: &Config, out: Option<&Path>, checks: &mut Vec<Check>) -> DynResult<()> {
    let spec = CurvatureSpec::from_config(&cfg.curvature)?;
    let n_max = spec.family.n_max;

    let bad = match spec.family.verify_exact() {
        Ok(()) => 0.0,
        Err(n) => n as f64,
    };
    checks.push(Check::below("square_disjointness_first_overlap", bad, 0.5));
    let violations = spec.schedule.violations(&spec.profile).len() as f64;
    checks.push(Check::below("gamma_schedule_violations", violations, 0.5));

    for n in 1..=n_max {
        let rep = spec.smoothness_certificate(n, cfg.k)?;
        let ratio =
            rep.orders.iter().map(|o| o.max_observed / o.bound_scaled.min(o.bound_schedule)).fold(0.0f64, f64::max);
        checks.push(Check::below(format!("smoothness_ratio_n{n}"), ratio, 1.0));
        checks.push(Check::new(format!("boundary_max_abs_k_n{n}"), rep.boundary_max, 0.0, Bound::AtMost));
        if !rep.pass && ratio < 1.0 && rep.boundary_max == 0.0 {
            checks.push(Check::failed(format!("continuity_n{n}")));
        }
        let inside = SquareFamily::inner(n);
        // Closer to the corners the product of the two bumps underflows.
        let inset = inside.shrink(1e-2 * SquareFamily::inner_half_width(n));
        let min_inside = inset.lattice(cfg.samples).into_iter().map(|p| spec.k_eval(p)).fold(f64::INFINITY, f64::min);
        checks.push(Check::above(format!("min_k_inside_n{n}"), min_inside, 0.0));
    }

    // Outside every inner square K must vanish identically.
    let grid = Grid2D::covering(&support_box(), cfg.h)?;
    let mut outside = 0.0f64;
    for (_, _, p) in grid.nodes() {
        if !matches!(spec.locate(p), Region::Inner(_)) {
            outside = outside.max(spec.k_eval(p).abs());
        }
    }
    checks.push(Check::new("max_abs_k_outside", outside, 0.0, Bound::AtMost));

    dump_field(out, "k.csv", &spec.field(grid.rect()), &grid)
}
