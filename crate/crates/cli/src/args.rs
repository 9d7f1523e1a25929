//! Parsers for the composite flag values.

use darboux_core::Point;

/// Parses `x,y`.
pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    Ok(Point::new(parse_finite(x)?, parse_finite(y)?))
}

/// Parses `a:b` with `a < b`.
pub fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let (a, b) = (parse_finite(a)?, parse_finite(b)?);
    if a < b {
        Ok((a, b))
    } else {
        Err(format!("empty interval `{s}`"))
    }
}

/// Parses a finite, strictly positive number (steps and tolerances).
pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got `{s}`"))
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: `{s}`"))
    }
}
