//! Truncated power series in one and two variables, the Σ-transform and
//! the generating series of bi-free triplets.

mod one;
mod sigma;
mod two;
mod useries;

pub use one::{TruncSeries1, DEFAULT_K};
pub use sigma::{free_mul_convolve, moments_from_sigma, sigma_from_moments};
pub use two::TruncSeries2;
pub use useries::{u_series, USeries};
