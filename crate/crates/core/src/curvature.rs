//! The prescribed Gaussian curvature on a shrinking family of squares, and
//! a metric `dx² + G² dy²` realizing any given curvature.
//!
//! Squares `Xⁿ ⊂ X₁ⁿ` are centered at `qₙ = (1/n, 0)` with half-widths
//! `1/(4n(n+1))` and `1/(2n(n+1))`. Inside the closure of `Xⁿ`,
//! `K(q) = γₙ φ(4n(n+1)(q − qₙ))`; everywhere else `K = 0`.

use std::sync::OnceLock;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{fd_weights, Grid2D, Point, Rect, ScalarField};
use crate::geometry::Metric2;
use crate::jet::Jet;
use crate::ode::rk4_step;

/// Upper limit on `n_max` accepted from configuration.
pub const MAX_SQUARES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareFamily {
    pub n_max: usize,
}

impl SquareFamily {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > MAX_SQUARES {
            return Err(Error::Parse(format!("n_max must be in 1..={MAX_SQUARES}, got {n_max}")));
        }
        Ok(SquareFamily { n_max })
    }

    pub fn center(n: usize) -> Point {
        Point::new(1.0 / n as f64, 0.0)
    }

    /// `4n(n+1)`: the rescaling that maps `Xⁿ` onto `(−1, 1)²`.
    pub fn scale(n: usize) -> f64 {
        4.0 * n as f64 * (n + 1) as f64
    }

    pub fn inner_half_width(n: usize) -> f64 {
        1.0 / Self::scale(n)
    }

    pub fn outer_half_width(n: usize) -> f64 {
        2.0 / Self::scale(n)
    }

    pub fn inner(n: usize) -> Rect {
        Rect::square(Self::center(n), Self::inner_half_width(n))
    }

    pub fn outer(n: usize) -> Rect {
        Rect::square(Self::center(n), Self::outer_half_width(n))
    }

    /// Exact check that `Xⁿ ⊂ X₁ⁿ` and that the closed outer squares are
    /// pairwise disjoint for `n <= n_max`.
    ///
    /// All squares share the `y`-range `[−W, W]` around 0 and their
    /// centers decrease in `n`, so pairwise disjointness reduces to
    /// `right(X₁ⁿ⁺¹) < left(X₁ⁿ)` for consecutive indices: the intervals are
    /// then strictly ordered. Returns the first offending `n`, if any.
    pub fn verify_exact(&self) -> std::result::Result<(), usize> {
        let r = |num: i64, den: i64| Ratio::new(num, den);
        for n in 1..=self.n_max as i64 {
            let inner = r(1, 4 * n * (n + 1));
            let outer = r(1, 2 * n * (n + 1));
            if inner >= outer {
                return Err(n as usize);
            }
            if n < self.n_max as i64 {
                let m = n + 1;
                let left_n = r(1, n) - outer;
                let right_m = r(1, m) + r(1, 2 * m * (m + 1));
                if right_m >= left_n {
                    return Err(n as usize);
                }
            }
        }
        Ok(())
    }
}

/// Separable bump `φ(u, v) = ψ(u)ψ(v)`, `ψ(u) = exp(−1/(1 − u²))` on
/// `(−1, 1)`, zero elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpProfile {
    /// `B_k >= max_{|α|=k} sup |∂^α φ|` for `k = 0..=4`, with a 1.2 safety
    /// factor over dense sampling.
    pub bounds: [f64; 5],
}

fn psi_jet(u: Jet) -> Jet {
    let v = u.value();
    if v.abs() >= 1.0 {
        return Jet::constant(0.0, u.deg());
    }
    (-(1.0 - u * u).recip()).exp()
}

impl BumpProfile {
    pub fn default_bump() -> Self {
        static BOUNDS: OnceLock<[f64; 5]> = OnceLock::new();
        let bounds = *BOUNDS.get_or_init(|| {
            const SAMPLES: usize = 40_000;
            let mut m = [0.0f64; 5];
            for i in 1..SAMPLES {
                let u = -1.0 + 2.0 * i as f64 / SAMPLES as f64;
                let (x, _) = Jet::vars(u, 0.0, 4);
                let j = psi_jet(x);
                for (a, ma) in m.iter_mut().enumerate() {
                    *ma = ma.max(j.partial(a, 0).abs());
                }
            }
            let mut b = [0.0; 5];
            for (k, bk) in b.iter_mut().enumerate() {
                *bk = 1.2 * (0..=k).map(|a| m[a] * m[k - a]).fold(0.0, f64::max);
            }
            b
        });
        BumpProfile { bounds }
    }

    pub fn eval_jet(&self, u: Jet, v: Jet) -> Jet {
        psi_jet(u) * psi_jet(v)
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        let (x, y) = Jet::vars(u, v, 0);
        self.eval_jet(x, y).value()
    }

    pub fn field(&self) -> ScalarField {
        let me = *self;
        ScalarField::analytic(Rect::new(-1.0, 1.0, -1.0, 1.0), move |u, v| me.eval_jet(u, v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedGammaRule {
    PaperDefault,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaRule {
    Named(NamedGammaRule),
    Explicit(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiChoice {
    DefaultBump,
}

/// On-disk form of a [`CurvatureSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    pub n_max: usize,
    pub gamma_rule: GammaRule,
    pub phi: PhiChoice,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        CurvatureConfig {
            n_max: 8,
            gamma_rule: GammaRule::Named(NamedGammaRule::PaperDefault),
            phi: PhiChoice::DefaultBump,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaSchedule {
    values: Vec<f64>,
}

impl GammaSchedule {
    /// `γₙ = 2⁻ⁿ / max(1, (4n(n+1))⁴ B₄)`.
    pub fn paper_default(n_max: usize, profile: &BumpProfile) -> Self {
        let values = (1..=n_max)
            .map(|n| 0.5f64.powi(n as i32) / (SquareFamily::scale(n).powi(4) * profile.bounds[4]).max(1.0))
            .collect();
        GammaSchedule { values }
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parse("explicit gamma schedule is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Parse(format!("gamma values must be positive and finite, got {v}")));
        }
        Ok(GammaSchedule { values })
    }

    /// `γₙ` for one-based `n`.
    pub fn gamma(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices violating positivity, monotone decay, or
    /// `γₙ(4n(n+1))⁴B₄ <= 2⁻ⁿ`.
    pub fn violations(&self, profile: &BumpProfile) -> Vec<usize> {
        let mut bad = Vec::new();
        for n in 1..=self.values.len() {
            let g = self.gamma(n);
            let dominated =
                g * SquareFamily::scale(n).powi(4) * profile.bounds[4] <= 0.5f64.powi(n as i32) * (1.0 + 1e-12);
            let decreasing = n == 1 || g <= self.gamma(n - 1);
            if !(g > 0.0 && dominated && decreasing) {
                bad.push(n);
            }
        }
        bad
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "region", content = "n", rename_all = "snake_case")]
pub enum Region {
    Inner(usize),
    Transition(usize),
    Outside,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureSpec {
    pub family: SquareFamily,
    pub profile: BumpProfile,
    pub schedule: GammaSchedule,
}

impl CurvatureSpec {
    pub fn paper_default(n_max: usize) -> Result<Self> {
        let family = SquareFamily::new(n_max)?;
        let profile = BumpProfile::default_bump();
        let schedule = GammaSchedule::paper_default(n_max, &profile);
        Ok(CurvatureSpec { family, profile, schedule })
    }

    pub fn from_config(cfg: &CurvatureConfig) -> Result<Self> {
        let family = SquareFamily::new(cfg.n_max)?;
        let profile = match cfg.phi {
            PhiChoice::DefaultBump => BumpProfile::default_bump(),
        };
        let schedule = match &cfg.gamma_rule {
            GammaRule::Named(NamedGammaRule::PaperDefault) => GammaSchedule::paper_default(cfg.n_max, &profile),
            GammaRule::Explicit(v) => {
                if v.len() < cfg.n_max {
                    return Err(Error::Parse(format!(
                        "explicit gamma schedule has {} entries, n_max is {}",
                        v.len(),
                        cfg.n_max
                    )));
                }
                GammaSchedule::explicit(v[..cfg.n_max].to_vec())?
            }
        };
        Ok(CurvatureSpec { family, profile, schedule })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CurvatureConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        CurvatureSpec::from_config(&cfg)
    }

    pub fn locate(&self, q: Point) -> Region {
        if !(q.x.is_finite() && q.y.is_finite()) || q.x <= 0.0 {
            return Region::Outside;
        }
        let guess = (1.0 / q.x).round();
        if !guess.is_finite() || guess > (self.family.n_max + 1) as f64 {
            return Region::Outside;
        }
        let guess = guess as usize;
        for n in guess.saturating_sub(1).max(1)..=(guess + 1).min(self.family.n_max) {
            let c = SquareFamily::center(n);
            let d = (q.x - c.x).abs().max(q.y.abs());
            if d <= SquareFamily::inner_half_width(n) {
                return Region::Inner(n);
            }
            if d < SquareFamily::outer_half_width(n) {
                return Region::Transition(n);
            }
        }
        Region::Outside
    }

    fn k_jet(&self, x: Jet, y: Jet) -> Jet {
        match self.locate(Point::new(x.value(), y.value())) {
            Region::Inner(n) => {
                let s = SquareFamily::scale(n);
                let c = SquareFamily::center(n);
                self.profile.eval_jet((x - c.x) * s, (y - c.y) * s) * self.schedule.gamma(n)
            }
            Region::Transition(_) | Region::Outside => Jet::constant(0.0, x.deg()),
        }
    }

    pub fn k_eval(&self, q: Point) -> f64 {
        let (x, y) = Jet::vars(q.x, q.y, 0);
        self.k_jet(x, y).value()
    }

    pub fn field(&self, domain: Rect) -> ScalarField {
        let me = self.clone();
        ScalarField::analytic(domain, move |x, y| me.k_jet(x, y))
    }

    /// Samples finite differences of `K` of every order `<= k` along
    /// transects crossing `∂Xⁿ` and checks them against
    /// `2γₙ(4n(n+1))ʲB_j` and the schedule target `2·2⁻ⁿ`.
    pub fn smoothness_certificate(&self, n: usize, k: usize) -> Result<SmoothnessReport> {
        if n == 0 || n > self.family.n_max {
            return Err(Error::Precondition(format!("n = {n} outside 1..={}", self.family.n_max)));
        }
        if k > 4 {
            return Err(Error::OrderTooHigh { requested: k, max: 4 });
        }
        const SAMPLES_PER_HALF_WIDTH: usize = 400;
        let w = SquareFamily::inner_half_width(n);
        let c = SquareFamily::center(n);
        let delta = w / SAMPLES_PER_HALF_WIDTH as f64;
        let reach = (1.5 * SAMPLES_PER_HALF_WIDTH as f64) as i64;
        let tangential = [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
        let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
        let gamma = self.schedule.gamma(n);
        let scale = SquareFamily::scale(n);
        let target = 2.0 * 0.5f64.powi(n as i32);

        let mut orders = Vec::with_capacity(k + 1);
        let mut max_jump = 0.0f64;
        let mut boundary_max = 0.0f64;
        for order in 0..=k {
            let half = order.div_ceil(2).max(if order == 0 { 0 } else { 1 });
            let offsets: Vec<f64> = (-(half as i64)..=half as i64).map(|j| j as f64).collect();
            let weights = &fd_weights(0.0, &offsets, order)[order];
            let mut max_obs = 0.0f64;
            for (dx, dy) in dirs {
                for t in tangential {
                    let (tx, ty) = (-dy * t * w, dx * t * w);
                    let at = |i: i64| {
                        let r = i as f64 * delta;
                        self.k_eval(Point::new(c.x + tx + dx * r, c.y + ty + dy * r))
                    };
                    for i in (half as i64)..=(reach - half as i64) {
                        let d: f64 = weights.iter().zip(&offsets).map(|(wt, o)| wt * at(i + *o as i64)).sum::<f64>()
                            / delta.powi(order as i32);
                        max_obs = max_obs.max(d.abs());
                    }
                    if order == 0 {
                        let b = SAMPLES_PER_HALF_WIDTH as i64;
                        max_jump = max_jump.max((at(b - 1) - at(b + 1)).abs());
                        boundary_max = boundary_max.max(at(b).abs());
                    }
                }
            }
            let bound_scaled = 2.0 * gamma * scale.powi(order as i32) * self.profile.bounds[order];
            orders.push(OrderCheck {
                order,
                max_observed: max_obs,
                bound_scaled,
                bound_schedule: target,
                pass: max_obs <= bound_scaled && max_obs <= target,
            });
        }
        let jump_bound = 2.0 * gamma * scale * self.profile.bounds[1] * 2.0 * delta;
        let continuous = boundary_max == 0.0 && max_jump <= jump_bound;
        let pass = continuous && orders.iter().all(|o| o.pass);
        Ok(SmoothnessReport { n, k, orders, max_jump, boundary_max, pass })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderCheck {
    pub order: usize,
    pub max_observed: f64,
    pub bound_scaled: f64,
    pub bound_schedule: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub n: usize,
    pub k: usize,
    pub orders: Vec<OrderCheck>,
    /// Largest `|K(b − δ) − K(b + δ)|` across the boundary.
    pub max_jump: f64,
    /// Largest `|K|` sampled on `∂Xⁿ`.
    pub boundary_max: f64,
    pub pass: bool,
}

/// Warp `G` solving `∂ₓₓG + KG = 0`, `G(0, y) = 1`, `∂ₓG(0, y) = 0`, and the
/// metric `dx² + G² dy²`.
#[derive(Clone, Debug)]
pub struct MetricFromCurvature {
    pub metric: Metric2,
    pub warp: ScalarField,
    pub grid: Grid2D,
}

/// Integrates `G'' = −K G` along every `y`-line of a grid with spacing
/// `step`, in both directions from `x = 0`, by classical RK4.
pub fn metric_from_curvature(k: &ScalarField, domain: Rect, step: f64) -> Result<MetricFromCurvature> {
    if !(step > 0.0) || domain.is_empty() {
        return Err(Error::Precondition("need a positive step and a nonempty domain".into()));
    }
    if !(domain.x0 <= 0.0 && domain.x1 >= 0.0) {
        return Err(Error::Precondition("domain must meet the line x = 0".into()));
    }
    let back = (-domain.x0 / step + 1e-9).floor() as usize;
    let fwd = (domain.x1 / step + 1e-9).floor() as usize;
    let ny = (domain.height() / step + 1e-9).floor() as usize + 1;
    let grid = Grid2D::new(Point::new(-(back as f64) * step, domain.y0), step, back + fwd + 1, ny)?;

    let rows: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let y = grid.y(j);
            let rhs = |x: f64, s: [f64; 2]| -> Result<[f64; 2]> { Ok([s[1], -k.value(Point::new(x, y))? * s[0]]) };
            let mut row = vec![0.0; grid.nx];
            row[back] = 1.0;
            for (dir, count) in [(1.0, fwd), (-1.0, back)] {
                let mut state = [1.0, 0.0];
                for i in 0..count {
                    let x = dir * i as f64 * step;
                    state = rk4_step(&rhs, x, state, dir * step)?;
                    let xi = x + dir * step;
                    if state[0] <= 0.0 {
                        return Err(Error::NonPositiveWarp(Point::new(xi, y)));
                    }
                    let col = if dir > 0.0 { back + i + 1 } else { back - i - 1 };
                    row[col] = state[0];
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let values = rows.concat();
    let warp = ScalarField::sampled(grid, values)?;
    Ok(MetricFromCurvature { metric: Metric2::warped(&warp), warp, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gaussian_curvature;

    #[test]
    fn locate_examples() {
        let spec = CurvatureSpec::paper_default(8).unwrap();
        assert_eq!(spec.locate(Point::new(1.0, 0.0)), Region::Inner(1));
        assert_eq!(spec.locate(Point::new(0.3, 0.7)), Region::Outside);
        assert_eq!(spec.locate(Point::new(0.5 + 1.0 / 20.0, 0.0)), Region::Transition(2));
        assert_eq!(spec.locate(Point::new(-1.0, 0.0)), Region::Outside);
        // Beyond n_max nothing is materialized.
        assert_eq!(spec.locate(Point::new(1.0 / 20.0, 0.0)), Region::Outside);
    }

    #[test]
    fn k_eval_examples() {
        let spec = CurvatureSpec::paper_default(8).unwrap();
        for n in 1..=8 {
            let v = spec.k_eval(SquareFamily::center(n));
            let expect = spec.schedule.gamma(n) * (-2.0f64).exp();
            assert!((v - expect).abs() <= 1e-15 * expect);
            let edge = Point::new(SquareFamily::center(n).x + SquareFamily::inner_half_width(n), 0.0);
            assert_eq!(spec.k_eval(edge), 0.0);
        }
        assert_eq!(spec.k_eval(Point::new(-1.0, 0.0)), 0.0);
    }

    #[test]
    fn schedule_satisfies_domination_rule() {
        let spec = CurvatureSpec::paper_default(20).unwrap();
        assert!(spec.schedule.violations(&spec.profile).is_empty());
        let bad = GammaSchedule::explicit(vec![1.0; 10]).unwrap();
        assert!(!bad.violations(&spec.profile).is_empty());
    }

    #[test]
    fn disjointness_small_families() {
        assert_eq!(SquareFamily::new(100).unwrap().verify_exact(), Ok(()));
    }

    #[test]
    fn bump_bounds_are_sane() {
        let b = BumpProfile::default_bump();
        // B₀ = 1.2 · e⁻²: φ peaks at the origin.
        assert!((b.bounds[0] - 1.2 * (-2.0f64).exp()).abs() < 1e-12);
        assert!(b.bounds.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn certificate_passes_and_fails_as_expected() {
        let spec = CurvatureSpec::paper_default(3).unwrap();
        let r = spec.smoothness_certificate(3, 4).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.orders[4].max_observed <= 0.25);
        assert_eq!(r.boundary_max, 0.0);

        let cfg =
            CurvatureConfig { n_max: 10, gamma_rule: GammaRule::Explicit(vec![1.0; 10]), phi: PhiChoice::DefaultBump };
        let bad = CurvatureSpec::from_config(&cfg).unwrap();
        let r = bad.smoothness_certificate(10, 4).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn config_json() {
        let spec =
            CurvatureSpec::from_json(r#"{"n_max": 3, "gamma_rule": "paper_default", "phi": "default_bump"}"#).unwrap();
        assert_eq!(spec.family.n_max, 3);
        let spec =
            CurvatureSpec::from_json(r#"{"n_max": 2, "gamma_rule": [0.5, 0.25], "phi": "default_bump"}"#).unwrap();
        assert_eq!(spec.schedule.gamma(2), 0.25);
        assert!(CurvatureSpec::from_json(r#"{"n_max": 3, "gamma_rule": [0.5], "phi": "default_bump"}"#).is_err());
        assert!(
            CurvatureSpec::from_json(r#"{"n_max": 0, "gamma_rule": "paper_default", "phi": "default_bump"}"#).is_err()
        );
        assert!(CurvatureSpec::from_json(r#"{"n_max": 1, "gamma_rule": [-1.0], "phi": "default_bump"}"#).is_err());
        assert!(CurvatureSpec::from_json(r#"{"n_max": 1, "gamma_rule": "other", "phi": "default_bump"}"#).is_err());
        let text = serde_json::to_string(&CurvatureConfig::default()).unwrap();
        assert_eq!(text, r#"{"n_max":8,"gamma_rule":"paper_default","phi":"default_bump"}"#);
    }

    #[test]
    fn constant_curvature_warps() {
        let dom = Rect::new(-0.4, 0.4, -0.05, 0.05);
        for (kv, exact) in [(1.0, f64::cos as fn(f64) -> f64), (-1.0, f64::cosh), (0.0, |_| 1.0)] {
            let k = ScalarField::constant(dom, kv);
            let out = metric_from_curvature(&k, dom, 1e-3).unwrap();
            for (_, _, p) in out.grid.nodes().step_by(37) {
                assert!((out.warp.value(p).unwrap() - exact(p.x)).abs() < 1e-8);
            }
            let p = Point::new(0.2, 0.0);
            let kk = gaussian_curvature(&out.metric, p).unwrap();
            assert!((kk - kv).abs() < 1e-6, "K = {kk}");
        }
    }

    #[test]
    fn warp_positivity_failure() {
        let dom = Rect::new(-2.0, 2.0, -0.05, 0.05);
        let k = ScalarField::constant(dom, 1.0);
        assert!(matches!(metric_from_curvature(&k, dom, 1e-2), Err(Error::NonPositiveWarp(_))));
    }
}
