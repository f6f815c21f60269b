use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::numeric::ComplexSum;

/// Default grid size for the periodic trapezoid rule.
pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

/// The kernel `𝒦_p(e^{iθ}) = (s^p − 1 − ip·Im s)/(1 − Re s)`, extended by
/// continuity with `𝒦_p(1) = −p²`.
pub fn kernel_k(p: i64, theta: f64) -> Complex64 {
    let half = 0.5 * theta;
    let sh = half.sin();
    let denom = 2.0 * sh * sh;
    if denom == 0.0 {
        return Complex64::new(-((p * p) as f64), 0.0);
    }
    let pf = p as f64;
    let shp = (pf * half).sin();
    let re = -2.0 * shp * shp;
    let im = (pf * theta).sin() - pf * theta.sin();
    Complex64::new(re / denom, im / denom)
}

/// `∫_{−π}^{π} 𝒦_p(e^{iθ}) dθ` by the periodic trapezoid rule on `n` points.
pub fn kernel_integral(p: i64, n: usize) -> Complex64 {
    let h = TAU / n as f64;
    let mut acc = ComplexSum::new();
    for k in 0..n {
        acc.add(kernel_k(p, -std::f64::consts::PI + h * k as f64));
    }
    acc.value() * h
}

/// Largest `|Im 𝒦_p|` over a uniform grid of `n` points.
pub fn kernel_im_sup(p: i64, n: usize) -> f64 {
    let h = TAU / n as f64;
    (0..n)
        .map(|k| kernel_k(p, -std::f64::consts::PI + h * k as f64).im.abs())
        .fold(0.0, f64::max)
}
