use num_complex::Complex64;

use super::one::TruncSeries1;
use super::two::TruncSeries2;
use crate::error::{check_dim, Error, Result};
use crate::levy::{LevyMeasureT, MulLevyTriplet};
use crate::measures::values;

/// Generating series attached to a bi-torus triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct USeries {
    /// Gaussian part `N`.
    pub n: TruncSeries2,
    /// Levy-measure part `P`.
    pub p: TruncSeries2,
    /// `U`.
    pub u: TruncSeries2,
    /// `U / ((1 − z)(1 − w))`.
    pub divided: TruncSeries2,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `1/(1 − a·x)` as a one-variable series.
fn geometric(a: Complex64, k: usize) -> TruncSeries1 {
    TruncSeries1::new(vec![c(1.0, 0.0), -a], k)
        .inv()
        .expect("unit constant term")
}

/// Builds `N`, `P`, `U` and the divided series through bidegree `K`.
pub fn u_series(t: &MulLevyTriplet, k: usize) -> Result<USeries> {
    check_dim(2, t.dim())?;
    let rho = match t.rho() {
        LevyMeasureT::Atomic(m) => m,
        LevyMeasureT::HaarKernelDensity { .. } => {
            return Err(Error::Unsupported(
                "generating series require an atomic Levy measure".into(),
            ))
        }
    };
    let one = TruncSeries2::one(k);
    let z = TruncSeries2::z(k);
    let w = TruncSeries2::w(k);
    let gz = TruncSeries2::from_z(&geometric(c(1.0, 0.0), k));
    let gw = TruncSeries2::from_w(&geometric(c(1.0, 0.0), k));
    let a = t.a();

    let n_zz = (&(&z * &(&one + &z)) * &(&gz * &gz)).scale(c(0.5 * a[0][0], 0.0));
    let n_zw = (&(&z * &w) * &(&gz * &gw)).scale(c(a[0][1], 0.0));
    let n_ww = (&(&w * &(&one + &w)) * &(&gw * &gw)).scale(c(0.5 * a[1][1], 0.0));
    let n = &(&n_zz + &n_zw) + &n_ww;

    let gzgw = &gz * &gw;
    let mut integral = TruncSeries2::zero(k);
    for atom in rho.atoms() {
        let theta = values(&atom.theta);
        let s1 = c(theta[0].cos(), theta[0].sin());
        let s2 = c(theta[1].cos(), theta[1].sin());
        let first =
            &TruncSeries2::from_z(&geometric(s1, k)) * &TruncSeries2::from_w(&geometric(s2, k));
        let drift1 = (&(&z * &gz) * &gzgw).scale(c(0.0, s1.im));
        let drift2 = (&(&w * &gw) * &gzgw).scale(c(0.0, s2.im));
        let f = &(&(&first - &gzgw) - &drift1) - &drift2;
        integral = &integral + &f.scale(c(atom.w, 0.0));
    }
    let damp = &(&one - &z) * &(&one - &w);
    let p = &damp * &integral;

    let g = values(t.gamma_arg());
    let drift = &(&z * &gz).scale(c(0.0, g[0])) + &(&w * &gw).scale(c(0.0, g[1]));
    let u = &(&drift - &n) + &p;
    let divided = u.div(&damp)?;
    Ok(USeries { n, p, u, divided })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{AtomicTorusMeasure, MeasureMode};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn trivial_triplet_gives_zero() {
        let s = u_series(&MulLevyTriplet::trivial(2), 5).unwrap();
        assert_eq!(s.u.max_abs_diff(&TruncSeries2::zero(5)), 0.0);
    }

    #[test]
    fn gaussian_divided_coefficients() {
        let t = MulLevyTriplet::new(
            &[0.0, 0.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            LevyMeasureT::zero(2),
        )
        .unwrap();
        let s = u_series(&t, 6).unwrap();
        for i in 0..=6 {
            for j in 0..=6 {
                let expect = -0.5 * (i * i + j * j) as f64;
                assert!((s.divided.coeff(i, j) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_atom_coefficient() {
        let rho = AtomicTorusMeasure::new(2, MeasureMode::Levy, vec![(vec![FRAC_PI_2, 0.0], PI)])
            .unwrap();
        let t = MulLevyTriplet::new(
            &[0.0, 0.0],
            vec![vec![0.0; 2]; 2],
            LevyMeasureT::Atomic(rho),
        )
        .unwrap();
        let s = u_series(&t, 4).unwrap();
        assert!((s.divided.coeff(1, 0) - c(-PI, 0.0)).norm() < 1e-13);
    }
}
