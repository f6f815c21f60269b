//! Levy triplets on tori and Euclidean space, their exponents, wrapping and
//! the homomorphisms between the classical and bi-free pictures.

mod gamma;
mod kernel;
mod triplet;

pub use gamma::{
    bifree_convolve, diagram_check, gamma_circ, gamma_map, DiagramReport, GammaDomainElement,
    GammaImage,
};
pub use kernel::{kernel_im_sup, kernel_integral, kernel_k, DEFAULT_QUADRATURE_POINTS};
pub use triplet::{
    add_lk_char, kappa_triplet, mul_lk_char, mul_lk_exponent, triplet_convolve, validate_psd,
    wrap_triplet, AddLevyTriplet, LevyMeasureT, MulLevyTriplet, PSD_TOL,
};
