use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Maps a real number to its representative in `(−π, π]`.
///
/// `π` maps to itself and `−π` maps to `π`; `−0.0` is normalized to `0.0`.
#[inline]
pub fn canonicalize(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x + 0.0;
    }
    let r = x.rem_euclid(TAU);
    let r = if r > PI { r - TAU } else { r };
    r + 0.0
}

/// An angle stored in the canonical range `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(x: f64) -> Self {
        Angle(canonicalize(x))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn neg(self) -> Self {
        Angle::new(-self.0)
    }

    pub fn add(self, other: Angle) -> Self {
        Angle::new(self.0 + other.0)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    /// `e^{iθ}`.
    pub fn point(self) -> num_complex::Complex64 {
        crate::numeric::cis(self.0)
    }
}

impl From<f64> for Angle {
    fn from(x: f64) -> Self {
        Angle::new(x)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

pub fn angles(xs: &[f64]) -> Vec<Angle> {
    xs.iter().copied().map(Angle::new).collect()
}

pub fn values(xs: &[Angle]) -> Vec<f64> {
    xs.iter().map(|a| a.value()).collect()
}

/// Distance from `x` to the nearest integer multiple of `2π`.
pub fn dist_to_2pi_lattice(x: f64) -> f64 {
    (x - TAU * (x / TAU).round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_goes_to_plus_pi() {
        assert_eq!(canonicalize(PI), PI);
        assert_eq!(canonicalize(-PI), PI);
        assert_eq!(canonicalize(3.0 * PI), PI);
    }

    #[test]
    fn full_turn_is_zero() {
        assert_eq!(canonicalize(TAU), 0.0);
        assert_eq!(canonicalize(-TAU), 0.0);
        assert!(canonicalize(-0.0).is_sign_positive());
    }

    #[test]
    fn lattice_distance() {
        assert!(dist_to_2pi_lattice(4.0 * PI + 1e-3) < 1.0000001e-3);
        assert!((dist_to_2pi_lattice(PI) - PI).abs() < 1e-15);
    }
}
