//! `scan lemma2`: boundary scan and smallness certificate on squares of
//! the family's sizes, centered where the height is normalized.

use std::path::Path;

use darboux_core::curvature::{CurvatureConfig, SquareFamily};
use darboux_core::embedding::{induced_metric, rigid_normalize, Fixture};
use darboux_core::geometry::gaussian_curvature;
use darboux_core::identities::{lemma2_boundary_scan, smallness_certificate};
use darboux_core::Rect;
use serde::Serialize;

use super::{finish, DynResult};
use crate::report::{Check, Report};

/// Lattice points per axis for the sign of `K`.
const K_SAMPLES: usize = 17;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub fixture: Fixture,
    pub curvature: CurvatureConfig,
}

pub fn run(cfg: &Config, _out: Option<&Path>) -> Report {
    let mut checks = Vec::new();
    let outcome = body(cfg, &mut checks);
    finish("scan lemma2", cfg, checks, outcome)
}

fn body(cfg: &Config, checks: &mut Vec<Check>) -> DynResult<()> {
    let domain = cfg.fixture.domain();
    let center = domain.center();
    let (g, z) = match cfg.fixture.embedding() {
        Some(f) => {
            let e = rigid_normalize(&f, center)?.embedding;
            (induced_metric(&e), e.z[2].clone())
        }
        None => (cfg.fixture.metric(), cfg.fixture.height()),
    };
    for n in 1..=cfg.curvature.n_max {
        let sq = Rect::square(center, SquareFamily::inner_half_width(n));
        if !domain.contains_rect(&sq) {
            continue;
        }
        // Vanishing of both boundary Hessian terms is only excluded where
        // K > 0, so the scan is checked there alone.
        let mut min_k = f64::INFINITY;
        for p in sq.lattice(K_SAMPLES) {
            min_k = min_k.min(gaussian_curvature(&g, p)?);
        }
        if min_k > 0.0 {
            let scan = lemma2_boundary_scan(&g, &z, &sq)?;
            checks.push(Check::above(format!("boundary_scan_max_n{n}"), scan.max, 0.0));
        }
        checks.push(Check::above(format!("smallness_certificate_n{n}"), smallness_certificate(&g, &z, &sq)?, 1.0));
    }
    if checks.is_empty() {
        return Err("no square of the family fits in the fixture domain".into());
    }
    Ok(())
}
