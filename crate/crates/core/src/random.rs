//! Seeded random inputs for the property suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fields::{Rect, ScalarField};
use crate::jet::Jet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ_{a+b<=degree} c_ab xᵃ yᵇ` with coefficients uniform in `[−1, 1]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, degree: usize, domain: Rect) -> ScalarField {
    let mut terms = Vec::new();
    for d in 0..=degree {
        for b in 0..=d {
            terms.push((d - b, b, rng.gen_range(-1.0..=1.0)));
        }
    }
    ScalarField::analytic(domain, move |x, y| {
        let mut acc = Jet::constant(0.0, x.deg());
        for &(a, b, c) in &terms {
            acc += x.powi(a as u32) * y.powi(b as u32) * c;
        }
        acc
    })
}

/// Axis-aligned square inside `domain` with side between `min_frac` and
/// `max_frac` of the shorter side.
pub fn random_subsquare<R: Rng>(rng: &mut R, domain: &Rect, min_frac: f64, max_frac: f64) -> Rect {
    let short = domain.width().min(domain.height());
    let side = short * rng.gen_range(min_frac..=max_frac);
    let x0 = domain.x0 + rng.gen_range(0.0..=1.0) * (domain.width() - side);
    let y0 = domain.y0 + rng.gen_range(0.0..=1.0) * (domain.height() - side);
    Rect::new(x0, x0 + side, y0, y0 + side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Point;

    #[test]
    fn reproducible_and_contained() {
        let d = Rect::new(-0.3, 0.3, -0.3, 0.3);
        let (mut a, mut b) = (rng(7), rng(7));
        let (pa, pb) = (random_polynomial(&mut a, 4, d), random_polynomial(&mut b, 4, d));
        let p = Point::new(0.1, -0.2);
        assert_eq!(pa.value(p).unwrap(), pb.value(p).unwrap());
        for _ in 0..50 {
            let s = random_subsquare(&mut a, &d, 0.2, 0.6);
            assert!(d.contains_rect(&s) && (s.width() - s.height()).abs() < 1e-15);
        }
        // Degree 4 means fifth derivatives vanish.
        assert!(pa.jet(p, 5).unwrap().partial(5, 0).abs() < 1e-12);
    }
}
