use num_complex::Complex64;

use super::array::TriangularArray;
use crate::error::{check_dim, Result};
use crate::measures::{canonicalize, Angle, AtomicTorusMeasure, MeasureMode, PlanarAtomicMeasure};
use crate::numeric::{cis, dot, dot_int, sum, ComplexSum};

/// Euclidean norm of an angle vector.
pub(crate) fn angle_norm(theta: &[f64]) -> f64 {
    dot(theta, theta).sqrt()
}

/// Compensated sum of terms sorted by value, so the result does not depend
/// on the order in which the terms were produced.
fn order_free_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.total_cmp(b));
    sum(terms)
}

/// A centred row of a torus array.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredRow {
    pub n: u64,
    /// `ξ_n` as angles.
    pub shift: Vec<f64>,
    /// `arg b_{nk}`.
    pub b_arg: Vec<Vec<f64>>,
    /// `ν̊_{nk}`.
    pub centered: Vec<AtomicTorusMeasure>,
    /// `ρ_n = Σ_k ν̊_{nk}`.
    pub rho_n: AtomicTorusMeasure,
    /// `γ_n`.
    pub gamma_n: Vec<Angle>,
}

/// `arg b = ∫_{𝒰_θ} arg s dν` over atoms.
fn centering_angle(nu: &AtomicTorusMeasure, theta: f64) -> Vec<f64> {
    (0..nu.dim())
        .map(|j| nu.integrate_real(|t| if angle_norm(t) < theta { t[j] } else { 0.0 }))
        .collect()
}

/// Centres level `n`: `b_{nk}`, `ν̊_{nk}`, `ρ_n` and `γ_n`.
pub fn center_row(array: &TriangularArray, n: u64) -> Result<CenteredRow> {
    let row = array.torus_row(n)?;
    let d = array.dim();
    let theta = array.theta();
    let mut b_arg = Vec::with_capacity(row.measures.len());
    let mut centered = Vec::with_capacity(row.measures.len());
    let mut drift_terms: Vec<Vec<f64>> = vec![Vec::with_capacity(2 * row.measures.len()); d];
    for nu in &row.measures {
        let b = centering_angle(nu, theta);
        let neg: Vec<f64> = b.iter().map(|x| -x).collect();
        let c = nu.rotate(&neg)?;
        for j in 0..d {
            drift_terms[j].push(b[j]);
            drift_terms[j].push(c.integrate_real(|t| t[j].sin()));
        }
        b_arg.push(b);
        centered.push(c);
    }
    let refs: Vec<&AtomicTorusMeasure> = centered.iter().collect();
    let rho_n = AtomicTorusMeasure::sum_of(d, MeasureMode::Finite, &refs)?;
    let gamma_n = (0..d)
        .map(|j| Angle::new(row.shift[j] + order_free_sum(std::mem::take(&mut drift_terms[j]))))
        .collect();
    Ok(CenteredRow {
        n,
        shift: row.shift,
        b_arg,
        centered,
        rho_n,
        gamma_n,
    })
}

impl CenteredRow {
    /// `ν̂_n(p) = ξ_n^p Π_k b_{nk}^p ν̊̂_{nk}(p)`.
    ///
    /// Uses the sum of principal logarithms when every factor lies within
    /// `1/2` of one, and the plain product otherwise.
    pub fn product_char(&self, p: &[i64]) -> Result<Complex64> {
        check_dim(self.shift.len(), p.len())?;
        if p.iter().all(|&x| x == 0) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let factors: Vec<Complex64> = self
            .centered
            .iter()
            .map(|m| m.moment_unchecked(p))
            .collect();
        let mut phase_terms = vec![dot_int(p, &self.shift)];
        phase_terms.extend(self.b_arg.iter().map(|b| dot_int(p, b)));
        let phase = sum(phase_terms);
        if factors.iter().all(|z| (z - 1.0).norm() < 0.5) {
            let mut acc = ComplexSum::new();
            for z in &factors {
                acc.add(z.ln());
            }
            let l = acc.value();
            Ok((l + Complex64::new(0.0, phase)).exp())
        } else {
            let mut prod = cis(phase);
            for z in &factors {
                prod *= z;
            }
            Ok(prod)
        }
    }

    /// `z_{nk}(p) = ν̊̂_{nk}(p) − 1`.
    pub fn z(&self, k: usize, p: &[i64]) -> Complex64 {
        self.centered[k].moment_unchecked(p) - 1.0
    }
}

/// `ν̂_n(p)` for a torus array.
pub fn classical_product_char(array: &TriangularArray, n: u64, p: &[i64]) -> Result<Complex64> {
    center_row(array, n)?.product_char(p)
}

/// A centred row of a planar array.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveCenteredRow {
    pub n: u64,
    /// `v_{nk} = ∫_{𝒱_θ} x dμ_{nk}`.
    pub v_nk: Vec<Vec<f64>>,
    pub centered: Vec<PlanarAtomicMeasure>,
    /// `τ_n = Σ_k μ̊_{nk}`.
    pub tau_n: PlanarAtomicMeasure,
    /// `v_n + Σ_k (v_{nk} + ∫ x/(1+‖x‖²) dμ̊_{nk})`.
    pub drift: Vec<f64>,
}

pub fn additive_center_row(array: &TriangularArray, n: u64) -> Result<AdditiveCenteredRow> {
    let row = array.planar_row(n)?;
    let d = array.dim();
    let theta = array.theta();
    let mut v_nk = Vec::with_capacity(row.measures.len());
    let mut centered = Vec::with_capacity(row.measures.len());
    let mut terms: Vec<Vec<f64>> = vec![Vec::new(); d];
    for mu in &row.measures {
        let v: Vec<f64> = (0..d)
            .map(|j| mu.integrate_real(|x| if dot(x, x).sqrt() < theta { x[j] } else { 0.0 }))
            .collect();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let c = mu.translate(&neg, MeasureMode::Probability)?;
        for j in 0..d {
            terms[j].push(v[j]);
            terms[j].push(c.integrate_real(|x| x[j] / (1.0 + dot(x, x))));
        }
        v_nk.push(v);
        centered.push(c);
    }
    let refs: Vec<&PlanarAtomicMeasure> = centered.iter().collect();
    let tau_n = PlanarAtomicMeasure::sum_of(d, MeasureMode::Finite, &refs)?;
    let drift = (0..d)
        .map(|j| row.shift[j] + order_free_sum(std::mem::take(&mut terms[j])))
        .collect();
    Ok(AdditiveCenteredRow {
        n,
        v_nk,
        centered,
        tau_n,
        drift,
    })
}

/// `γ_n` reduced to angles, for comparisons.
pub(crate) fn angle_gap(a: &[Angle], b: &[Angle]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| canonicalize(x.value() - y.value()).abs())
        .fold(0.0, f64::max)
}
