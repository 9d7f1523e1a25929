use crate::fields::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point ({}, {}) lies outside the field domain", .0.x, .0.y)]
    OutsideDomain(Point),

    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("rectangle is empty or degenerate")]
    EmptyRect,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("metric is degenerate at ({}, {})", .0.x, .0.y)]
    DegenerateMetric(Point),

    #[error("embedding is not an immersion at ({}, {})", .0.x, .0.y)]
    DegenerateTangentPlane(Point),

    #[error("G <= 0 at ({}, {}); shrink the domain", .0.x, .0.y)]
    NonPositiveWarp(Point),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("characteristic construction failed: {0}")]
    Characteristic(String),

    #[error("Newton inversion did not converge at (t, s) = ({}, {})", .0.x, .0.y)]
    NewtonFailed(Point),

    #[error("flat development failed: {0}")]
    Development(String),

    #[error("parse error: {0}")]
    Parse(String),
}
