use approx::assert_abs_diff_eq;
use darboux_core::curvature::{metric_from_curvature, CurvatureSpec, SquareFamily};
use darboux_core::embedding::Fixture;
use darboux_core::geometry::{gaussian_curvature, gaussian_curvature_field};
use darboux_core::identities::{boundary_identity, smallness_certificate, DEFAULT_GATE_TOL};
use darboux_core::reduction::{reduced_equation_residual, ReductionOptions};
use darboux_core::{Point, Rect, ScalarField};

#[test]
fn sphere_of_radius_two_has_curvature_one_quarter() {
    let g = Fixture::Sphere.metric();
    for p in Fixture::Sphere.domain().lattice(7) {
        assert_abs_diff_eq!(gaussian_curvature(&g, p).unwrap(), 0.25, epsilon = 1e-12);
    }
}

#[test]
fn spec_json_to_metric_reproduces_the_bump() {
    let spec =
        CurvatureSpec::from_json(r#"{"n_max": 3, "gamma_rule": "paper_default", "phi": "default_bump"}"#).unwrap();
    let w = SquareFamily::outer_half_width(3);
    let c = SquareFamily::center(3);
    let domain = Rect::new(-0.05, c.x + 1.5 * w, -1.5 * w, 1.5 * w);
    let k = spec.field(domain);
    let built = metric_from_curvature(&k, domain, 5e-4).unwrap();
    let p = Point::new(c.x + 0.3 * SquareFamily::inner_half_width(3), 0.0);
    let want = k.value(p).unwrap();
    assert!(want > 0.0);
    // K(g) recovers K to the FD accuracy of the sampled warp.
    assert_abs_diff_eq!(gaussian_curvature(&built.metric, p).unwrap(), want, epsilon = 1e-6);
}

#[test]
fn boundary_identity_balances_on_the_cosine_metric() {
    let fx = Fixture::Cosmetric;
    let (g, z) = (fx.metric(), fx.height());
    let k = gaussian_curvature_field(&g);
    let sq = Rect::new(-0.4, 0.2, -0.1, 0.5);
    let v = boundary_identity(&g, &z, &k, &sq, 8, DEFAULT_GATE_TOL).unwrap();
    assert_abs_diff_eq!(v.lhs, v.rhs, epsilon = 1e-10);
    // 2 − 3|∇z|² stays above 1 only near the origin, where ∇z = 0.
    assert!(smallness_certificate(&g, &z, &Rect::square(Point::new(0.0, 0.0), 0.2)).unwrap() > 1.0);
    assert!(smallness_certificate(&g, &z, &sq).unwrap() < 1.0);
}

#[test]
fn boundary_identity_rejects_non_solutions() {
    let fx = Fixture::Sphere;
    let g = fx.metric();
    let k = gaussian_curvature_field(&g);
    let z = ScalarField::analytic(fx.domain(), |x, y| x * y);
    assert!(boundary_identity(&g, &z, &k, &Rect::square(Point::new(0.0, 0.0), 0.1), 8, DEFAULT_GATE_TOL).is_err());
}

#[test]
fn reduction_off_center_on_the_sphere() {
    let fx = Fixture::Sphere;
    let g = fx.metric();
    let k = gaussian_curvature_field(&g);
    let opts = ReductionOptions { h: 0.01, ..ReductionOptions::default() };
    let r = reduced_equation_residual(&g, &fx.height(), &k, Point::new(0.1, -0.05), &opts).unwrap().report;
    assert_abs_diff_eq!(r.fbar_ratio, 1.0, epsilon = 1e-8);
    assert!(r.characteristic_rel < 1e-8 && r.b12_rel < 1e-6 && r.max_eq3_residual < 1e-4);
}
