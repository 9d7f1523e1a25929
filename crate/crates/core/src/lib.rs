//! Verification workbench for the Darboux equation
//! `det ∇ᵢⱼz = K|g|(1 − |∇_g z|²)` of the local isometric embedding problem.

// `!(x > 0.0)` is used on purpose so that NaN is rejected; index loops
// mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curvature;
pub mod embedding;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod identities;
pub mod jet;
pub mod ode;
pub mod random;
pub mod reduction;

pub use error::{Error, Result};
pub use fields::{Grid2D, Point, Rect, ScalarField};
pub use jet::Jet;
