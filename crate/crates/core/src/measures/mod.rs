//! Measures on tori and on Euclidean space.

mod angle;
mod atomic;
mod moment;

pub use angle::{angles, canonicalize, dist_to_2pi_lattice, values, Angle};
pub use atomic::{
    wrap_pushforward, AtomicTorusMeasure, MeasureMode, PlanarAtom, PlanarAtomicMeasure, TorusAtom,
    PROBABILITY_TOL,
};
pub use moment::{
    bifree_convolve_special, circ_convolve, flip_star, kappa_moment, rotate, MomentMeasure,
};
