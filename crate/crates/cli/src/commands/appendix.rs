//! `verify appendix`: normal component by two routes, the Gauss/Darboux
//! link, flatness of `g − dz²`, and the development round trip.

use std::path::Path;

use darboux_core::embedding::{
    develop_flat, flat_candidate, flatness_residual, induced_metric, metric_mismatch, normal_component_sq,
    verify_gauss_darboux, DevelopOptions, Embedding3, Fixture,
};
use serde::Serialize;

use super::{dump_columns, finish, DynResult};
use crate::report::{Check, Report};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub fixture: Fixture,
    pub step: f64,
    pub normal_tol: f64,
    pub darboux_tol: f64,
    pub flatness_tol: f64,
    pub round_trip_tol: f64,
    pub path_tol: f64,
    /// Lattice points per axis of the normal-component comparison.
    pub samples: usize,
}

impl Config {
    pub fn new(fixture: Fixture) -> Self {
        Config {
            fixture,
            step: 0.01,
            normal_tol: 1e-10,
            darboux_tol: 1e-8,
            flatness_tol: 1e-6,
            round_trip_tol: 1e-4,
            path_tol: 1e-6,
            samples: 21,
        }
    }
}

pub fn run(cfg: &Config, out: Option<&Path>) -> Report {
    let mut checks = Vec::new();
    let outcome = body(cfg, out, &mut checks);
    finish("verify appendix", cfg, checks, outcome)
}

fn body(cfg: &Config, out: Option<&Path>, checks: &mut Vec<Check>) -> DynResult<()> {
    let g = cfg.fixture.metric();
    let z = cfg.fixture.height();
    let domain = cfg.fixture.domain();

    if let Some(f) = cfg.fixture.embedding() {
        let mut worst = 0.0f64;
        for p in domain.lattice(cfg.samples) {
            worst = worst.max(normal_component_sq(&f, p)?.difference.abs());
        }
        checks.push(Check::below("normal_component_routes", worst, cfg.normal_tol));
        checks.push(Check::below("gauss_darboux", verify_gauss_darboux(&f)?, cfg.darboux_tol));
        if let Some(dir) = out {
            std::fs::create_dir_all(dir)?;
            let grid = darboux_core::Grid2D::covering(&domain, cfg.step)?;
            f.write_csv(std::io::BufWriter::new(std::fs::File::create(dir.join("embedding.csv"))?), &grid)?;
        }
    }

    checks.push(Check::below("flatness", flatness_residual(&g, &z)?, cfg.flatness_tol));

    let h = flat_candidate(&g, &z);
    let opts = DevelopOptions { step: cfg.step, path_tol: cfg.path_tol, flatness_tol: 10.0 * cfg.flatness_tol };
    let dev = develop_flat(&h, domain.center(), &opts)?;
    checks.push(Check::below("development_path_discrepancy", dev.path_discrepancy, cfg.path_tol));
    let rebuilt = Embedding3::new(dev.z1.clone(), dev.z2.clone(), z.clone());
    let err = metric_mismatch(&induced_metric(&rebuilt), &g, &dev.grid.rect())?;
    checks.push(Check::below("development_round_trip", err, cfg.round_trip_tol));
    dump_columns(out, "development.csv", &dev.grid, &["z1", "z2", "z3"], &[&dev.z1, &dev.z2, &z])
}
