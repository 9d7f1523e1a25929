//! `verify identities`: pointwise divergence identity on random polynomial
//! heights, the two geometric identities, and the integral identities on
//! random sub-squares.

use std::path::Path;

use darboux_core::embedding::Fixture;
use darboux_core::geometry::{
    chi_identity_residual, christoffel_trace_residual, divergence_identity_residual, gaussian_curvature_field,
};
use darboux_core::identities::{eq8_residual, generalized_identity_residual};
use darboux_core::random::{random_polynomial, random_subsquare, rng};
use serde::Serialize;

use super::{finish, DynResult, DEFAULT_SEED};
use crate::report::{Check, Report};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub fixture: Fixture,
    pub seed: u64,
    pub quad_order: usize,
    /// Tolerance of the divergence and integral identities.
    pub tol: f64,
    /// Tolerance of the χ and Christoffel trace identities.
    pub geometry_tol: f64,
    pub polynomials: usize,
    pub degree: usize,
    /// Lattice points per axis of the pointwise suites.
    pub samples: usize,
    pub squares: usize,
}

impl Config {
    pub fn new(fixture: Fixture) -> Self {
        Config {
            fixture,
            seed: DEFAULT_SEED,
            quad_order: darboux_core::fields::DEFAULT_ORDER,
            tol: 1e-8,
            geometry_tol: 1e-10,
            polynomials: 10,
            degree: 4,
            samples: 50,
            squares: 5,
        }
    }
}

pub fn run(cfg: &Config, _out: Option<&Path>) -> Report {
    let mut checks = Vec::new();
    let outcome = body(cfg, &mut checks);
    finish("verify identities", cfg, checks, outcome)
}

fn body(cfg: &Config, checks: &mut Vec<Check>) -> DynResult<()> {
    let g = cfg.fixture.metric();
    let domain = cfg.fixture.domain();
    let lattice = domain.lattice(cfg.samples);
    let mut rng = rng(cfg.seed);

    let mut worst = 0.0f64;
    for _ in 0..cfg.polynomials {
        let z = random_polynomial(&mut rng, cfg.degree, domain);
        for &p in &lattice {
            let (a, b) = divergence_identity_residual(&g, &z, p)?;
            worst = worst.max(a.abs()).max(b.abs());
        }
    }
    checks.push(Check::below("divergence_identity", worst, cfg.tol));

    let (mut chi, mut trace) = (0.0f64, 0.0f64);
    for &p in &lattice {
        let [a, b] = chi_identity_residual(&g, p)?;
        chi = chi.max(a.abs()).max(b.abs());
        let [a, b] = christoffel_trace_residual(&g, p)?;
        trace = trace.max(a.abs()).max(b.abs());
    }
    checks.push(Check::below("chi_identity", chi, cfg.geometry_tol));
    checks.push(Check::below("christoffel_trace", trace, cfg.geometry_tol));

    let k = gaussian_curvature_field(&g);
    for i in 0..cfg.squares {
        let z = random_polynomial(&mut rng, cfg.degree, domain);
        let sq = random_subsquare(&mut rng, &domain, 0.2, 0.8);
        let r = generalized_identity_residual(&g, &z, &k, &sq, cfg.quad_order)?;
        checks.push(Check::below(format!("generalized_identity_square{i}"), r.abs(), cfg.tol));
    }

    let z = cfg.fixture.height();
    for i in 0..cfg.squares {
        let sq = random_subsquare(&mut rng, &domain, 0.2, 0.8);
        let r = eq8_residual(&g, &z, &k, &sq, cfg.quad_order)?;
        checks.push(Check::below(format!("boundary_identity_square{i}"), r.abs(), cfg.tol));
    }
    Ok(())
}
