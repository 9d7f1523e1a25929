//! `reduce`: the characteristic-coordinate reduction at `h` and `h/2`.

use std::path::Path;

use darboux_core::embedding::Fixture;
use darboux_core::geometry::gaussian_curvature_field;
use darboux_core::reduction::{reduced_equation_residual, Reduction, ReductionOptions};
use darboux_core::{Grid2D, Point};
use serde::Serialize;

use super::{dump_field, finish, DynResult};
use crate::report::{Check, Report};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub fixture: Fixture,
    pub point: Point,
    pub h: f64,
    pub characteristic_tol: f64,
    pub b12_tol: f64,
    pub fbar_tol: f64,
    pub reduced_tol: f64,
    pub round_trip_tol: f64,
    /// Smallest accepted `residual(h)/residual(h/2)`.
    pub min_halving_ratio: f64,
}

impl Config {
    pub fn new(fixture: Fixture) -> Self {
        Config {
            fixture,
            point: Point::new(0.0, 0.0),
            h: 0.005,
            characteristic_tol: 1e-8,
            b12_tol: 1e-6,
            fbar_tol: 1e-8,
            reduced_tol: 1e-4,
            round_trip_tol: 1e-10,
            min_halving_ratio: 3.5,
        }
    }
}

/// The summary written to `reduce.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub c: f64,
    pub b11_p: f64,
    pub fbar_ratio: f64,
    pub max_eq3_residual: f64,
    pub min_f: f64,
    pub convergence_order: f64,
}

pub fn run(cfg: &Config, out: Option<&Path>) -> Report {
    let mut checks = Vec::new();
    let outcome = body(cfg, out, &mut checks);
    finish("reduce", cfg, checks, outcome)
}

pub fn reduce_at(cfg: &Config, h: f64) -> DynResult<Reduction> {
    let g = cfg.fixture.metric();
    let z = cfg.fixture.height();
    let k = gaussian_curvature_field(&g);
    let opts = ReductionOptions { h, ..ReductionOptions::default() };
    Ok(reduced_equation_residual(&g, &z, &k, cfg.point, &opts)?)
}

fn body(cfg: &Config, out: Option<&Path>, checks: &mut Vec<Check>) -> DynResult<()> {
    let coarse = reduce_at(cfg, cfg.h)?;
    let r = &coarse.report;
    checks.push(Check::below("characteristic_relative", r.characteristic_rel, cfg.characteristic_tol));
    checks.push(Check::below("b12_relative", r.b12_rel, cfg.b12_tol));
    checks.push(Check::below("fbar_ratio_error", (r.fbar_ratio - 1.0).abs(), cfg.fbar_tol));
    checks.push(Check::below("inverse_round_trip", r.round_trip, cfg.round_trip_tol));
    checks.push(Check::below("reduced_equation_residual", r.max_eq3_residual, cfg.reduced_tol));
    // f(p) = 2/b¹¹(p) when ∇z(p) = 0, so its sign follows b¹¹(p).
    checks.push(Check::above("f_at_p_times_sign_b11", r.f_at_p * r.b11_p.signum(), 0.0));

    let fine = reduce_at(cfg, cfg.h / 2.0)?;
    let ratio = r.max_eq3_residual / fine.report.max_eq3_residual;
    checks.push(Check::at_least("reduced_residual_halving_ratio", ratio, cfg.min_halving_ratio));

    if let Some(dir) = out {
        let summary = Summary {
            c: r.c,
            b11_p: r.b11_p,
            fbar_ratio: r.fbar_ratio,
            max_eq3_residual: r.max_eq3_residual,
            min_f: r.min_f,
            convergence_order: ratio.log2(),
        };
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        std::fs::write(dir.join("reduce.json"), text)?;
        let chart = &coarse.chart;
        let half = (chart.half_width / cfg.h).round() as usize;
        let xy = Grid2D::centered(cfg.point, cfg.h, half, half)?;
        dump_field(out, "s.csv", &chart.s_field(xy)?, &xy)?;
        dump_field(out, "u.csv", &coarse.u, &chart.grid)?;
        dump_field(out, "f.csv", &coarse.f, &chart.grid)?;
    }
    Ok(())
}
