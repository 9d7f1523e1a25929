//! `metric from-k`: integrates the warp for a given `K` and measures how
//! well the curvature of the result reproduces it.

use std::path::Path;

use darboux_core::curvature::{metric_from_curvature, CurvatureConfig, CurvatureSpec};
use darboux_core::geometry::gaussian_curvature;
use darboux_core::{Rect, ScalarField};
use serde::Serialize;

use super::{dump_field, finish, DynResult};
use crate::report::{Check, Report};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Constant(f64),
    Spec(CurvatureConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub source: Source,
    pub domain: Rect,
    pub step: f64,
    pub tol: f64,
    /// Tolerance of the closed-form warp comparison for constant `K`.
    pub warp_tol: f64,
    /// Lattice points per axis where `K(g)` is compared.
    pub samples: usize,
}

impl Config {
    pub fn new(source: Source, domain: Rect) -> Self {
        Config { source, domain, step: 1e-3, tol: 1e-6, warp_tol: 1e-8, samples: 41 }
    }
}

/// `G` for constant curvature `c` with `G(0) = 1`, `G'(0) = 0`.
pub fn constant_warp(c: f64, x: f64) -> f64 {
    if c > 0.0 {
        (c.sqrt() * x).cos()
    } else if c < 0.0 {
        ((-c).sqrt() * x).cosh()
    } else {
        1.0
    }
}

pub fn run(cfg: &Config, out: Option<&Path>) -> Report {
    let mut checks = Vec::new();
    let outcome = body(cfg, out, &mut checks);
    finish("metric from-k", cfg, checks, outcome)
}

fn body(cfg: &Config, out: Option<&Path>, checks: &mut Vec<Check>) -> DynResult<()> {
    let k = match &cfg.source {
        Source::Constant(c) => ScalarField::constant(cfg.domain, *c),
        Source::Spec(s) => CurvatureSpec::from_config(s)?.field(cfg.domain),
    };
    let built = metric_from_curvature(&k, cfg.domain, cfg.step)?;

    // Away from the edges the centered stencils of the sampled warp apply.
    let inner = cfg.domain.shrink(4.0 * cfg.step);
    let mut worst = 0.0f64;
    for p in inner.lattice(cfg.samples) {
        worst = worst.max((gaussian_curvature(&built.metric, p)? - k.value(p)?).abs());
    }
    checks.push(Check::below("curvature_round_trip", worst, cfg.tol));

    if let Source::Constant(c) = cfg.source {
        let mut err = 0.0f64;
        for (_, _, p) in built.grid.nodes() {
            err = err.max((built.warp.value(p)? - constant_warp(c, p.x)).abs());
        }
        checks.push(Check::below("warp_closed_form", err, cfg.warp_tol));
    }
    dump_field(out, "warp.csv", &built.warp, &built.grid)
}
