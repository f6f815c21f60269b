//! Infinitely divisible laws on the circle, the bi-torus and the plane.
//!
//! Measures are handled through their moments. Classical and bi-free
//! multiplicative convolutions are computed where closed forms exist, Levy
//! triplets are evaluated exactly, and triangular-array limits are checked at
//! finite `n`.

pub mod error;
pub mod idempotents;
pub mod json;
pub mod levy;
pub mod limits;
pub mod measures;
pub mod numeric;
pub mod series;
pub mod uniqueness;

pub use error::{Error, Result};
