use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::angle::{canonicalize, Angle};
use crate::error::{check_dim, Error, Result};
use crate::numeric::{cis, csum, dot, dot_int, sum, ComplexSum};

/// Default tolerance on the total mass of a probability measure.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// How the weights of an atomic measure are constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    /// Weights sum to one.
    Probability,
    /// Positive measure without an atom at the identity.
    Levy,
    /// Any finite positive measure.
    Finite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusAtom {
    pub theta: Vec<Angle>,
    pub w: f64,
}

/// Finitely supported positive measure on the torus of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicTorusMeasure {
    dim: usize,
    mode: MeasureMode,
    atoms: Vec<TorusAtom>,
}

fn validate_weight(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidMeasure(format!(
            "weight {w} is not a finite non-negative number"
        )));
    }
    Ok(())
}

fn check_mass(mode: MeasureMode, total: f64, tol: f64) -> Result<()> {
    if mode == MeasureMode::Probability && (total - 1.0).abs() > tol {
        return Err(Error::InvalidMeasure(format!(
            "total mass {total} differs from 1"
        )));
    }
    Ok(())
}

/// Merges entries whose keys are bitwise equal, keeping first-occurrence order.
fn merge_by_bits<T: Clone>(
    items: Vec<(Vec<f64>, f64)>,
    make: impl Fn(Vec<f64>, f64) -> T,
) -> Vec<T> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut merged: Vec<(Vec<f64>, f64)> = Vec::new();
    for (key, w) in items {
        let bits: Vec<u64> = key.iter().map(|x| x.to_bits()).collect();
        match index.get(&bits) {
            Some(&i) => merged[i].1 += w,
            None => {
                index.insert(bits, merged.len());
                merged.push((key, w));
            }
        }
    }
    merged.into_iter().map(|(k, w)| make(k, w)).collect()
}

impl AtomicTorusMeasure {
    /// Builds a measure from raw `(angles, weight)` pairs.
    ///
    /// Angles are canonicalized, zero weights dropped and equal atoms merged.
    pub fn new(dim: usize, mode: MeasureMode, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        Self::with_tolerance(dim, mode, atoms, PROBABILITY_TOL)
    }

    pub fn with_tolerance(
        dim: usize,
        mode: MeasureMode,
        atoms: Vec<(Vec<f64>, f64)>,
        tol: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be positive".into()));
        }
        let mut canon = Vec::with_capacity(atoms.len());
        for (theta, w) in atoms {
            check_dim(dim, theta.len())?;
            validate_weight(w)?;
            if theta.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite angle".into()));
            }
            if w == 0.0 {
                continue;
            }
            let theta: Vec<f64> = theta.into_iter().map(canonicalize).collect();
            if mode == MeasureMode::Levy && theta.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidMeasure(
                    "a Levy measure cannot charge the identity".into(),
                ));
            }
            canon.push((theta, w));
        }
        let atoms = merge_by_bits(canon, |theta, w| TorusAtom {
            theta: theta.into_iter().map(Angle::new).collect(),
            w,
        });
        let m = AtomicTorusMeasure { dim, mode, atoms };
        check_mass(mode, m.total_mass(), tol)?;
        Ok(m)
    }

    pub fn zero(dim: usize, mode: MeasureMode) -> Self {
        AtomicTorusMeasure {
            dim,
            mode,
            atoms: Vec::new(),
        }
    }

    pub fn dirac(theta: &[f64]) -> Result<Self> {
        Self::new(
            theta.len(),
            MeasureMode::Probability,
            vec![(theta.to_vec(), 1.0)],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> MeasureMode {
        self.mode
    }

    pub fn atoms(&self) -> &[TorusAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        sum(self.atoms.iter().map(|a| a.w))
    }

    /// `Σ w e^{i⟨p,θ⟩}` in atom order.
    pub fn moment(&self, p: &[i64]) -> Result<Complex64> {
        check_dim(self.dim, p.len())?;
        Ok(self.moment_unchecked(p))
    }

    pub(crate) fn moment_unchecked(&self, p: &[i64]) -> Complex64 {
        let mut acc = ComplexSum::new();
        for a in &self.atoms {
            let phase = dot_int(p, &super::angle::values(&a.theta));
            acc.add(cis(phase) * a.w);
        }
        acc.value()
    }

    /// `∫ f dν` over atoms, summed in atom order.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        csum(
            self.atoms
                .iter()
                .map(|a| f(&super::angle::values(&a.theta)) * a.w),
        )
    }

    pub fn integrate_real(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        sum(self
            .atoms
            .iter()
            .map(|a| f(&super::angle::values(&a.theta)) * a.w))
    }

    /// Re-labels the mode, re-validating the constraints of the new mode.
    pub fn into_mode(self, mode: MeasureMode) -> Result<Self> {
        let raw = self.raw();
        Self::new(self.dim, mode, raw)
    }

    pub(crate) fn raw(&self) -> Vec<(Vec<f64>, f64)> {
        self.atoms
            .iter()
            .map(|a| (super::angle::values(&a.theta), a.w))
            .collect()
    }

    /// Push-forward under `s ↦ β s`.
    pub fn rotate(&self, beta: &[f64]) -> Result<Self> {
        check_dim(self.dim, beta.len())?;
        let raw = self
            .raw()
            .into_iter()
            .map(|(t, w)| (t.iter().zip(beta).map(|(x, b)| x + b).collect(), w))
            .collect();
        Self::new(self.dim, self.mode, raw)
    }

    /// Push-forward under `(s₁, s₂) ↦ (s₁, s̄₂)`.
    pub fn flip(&self) -> Result<Self> {
        check_dim(2, self.dim)?;
        let raw = self
            .raw()
            .into_iter()
            .map(|(t, w)| (vec![t[0], -t[1]], w))
            .collect();
        Self::new(2, self.mode, raw)
    }

    /// Multiplies every weight by `factor`; the result is a finite measure
    /// unless the mode constraint still holds.
    pub fn scale(&self, factor: f64, mode: MeasureMode) -> Result<Self> {
        let raw = self
            .raw()
            .into_iter()
            .map(|(t, w)| (t, w * factor))
            .collect();
        Self::new(self.dim, mode, raw)
    }

    /// Sum of measures of equal dimension.
    pub fn sum_of(dim: usize, mode: MeasureMode, parts: &[&AtomicTorusMeasure]) -> Result<Self> {
        let mut raw = Vec::new();
        for p in parts {
            check_dim(dim, p.dim)?;
            raw.extend(p.raw());
        }
        Self::new(dim, mode, raw)
    }

    /// Restriction to atoms satisfying `keep`.
    pub fn restrict(&self, mode: MeasureMode, keep: impl Fn(&[f64]) -> bool) -> Result<Self> {
        let raw = self.raw().into_iter().filter(|(t, _)| keep(t)).collect();
        Self::new(self.dim, mode, raw)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarAtom {
    pub x: Vec<f64>,
    pub w: f64,
}

/// Finitely supported positive measure on `ℝ^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarAtomicMeasure {
    dim: usize,
    mode: MeasureMode,
    atoms: Vec<PlanarAtom>,
}

impl PlanarAtomicMeasure {
    pub fn new(dim: usize, mode: MeasureMode, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be positive".into()));
        }
        let mut kept = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            check_dim(dim, x.len())?;
            validate_weight(w)?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure("non-finite atom location".into()));
            }
            if w == 0.0 {
                continue;
            }
            let x: Vec<f64> = x.into_iter().map(|v| v + 0.0).collect();
            if mode == MeasureMode::Levy && x.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidMeasure(
                    "a Levy measure cannot charge the origin".into(),
                ));
            }
            kept.push((x, w));
        }
        let atoms = merge_by_bits(kept, |x, w| PlanarAtom { x, w });
        let m = PlanarAtomicMeasure { dim, mode, atoms };
        check_mass(mode, m.total_mass(), PROBABILITY_TOL)?;
        Ok(m)
    }

    pub fn zero(dim: usize, mode: MeasureMode) -> Self {
        PlanarAtomicMeasure {
            dim,
            mode,
            atoms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> MeasureMode {
        self.mode
    }

    pub fn atoms(&self) -> &[PlanarAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        sum(self.atoms.iter().map(|a| a.w))
    }

    /// `Σ w e^{i⟨u,x⟩}`.
    pub fn char(&self, u: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, u.len())?;
        Ok(csum(self.atoms.iter().map(|a| cis(dot(u, &a.x)) * a.w)))
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        csum(self.atoms.iter().map(|a| f(&a.x) * a.w))
    }

    pub fn integrate_real(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        sum(self.atoms.iter().map(|a| f(&a.x) * a.w))
    }

    pub(crate) fn raw(&self) -> Vec<(Vec<f64>, f64)> {
        self.atoms.iter().map(|a| (a.x.clone(), a.w)).collect()
    }

    pub fn scale(&self, factor: f64, mode: MeasureMode) -> Result<Self> {
        let raw = self
            .raw()
            .into_iter()
            .map(|(x, w)| (x, w * factor))
            .collect();
        Self::new(self.dim, mode, raw)
    }

    /// Push-forward under `x ↦ x + v`.
    pub fn translate(&self, v: &[f64], mode: MeasureMode) -> Result<Self> {
        check_dim(self.dim, v.len())?;
        let raw = self
            .raw()
            .into_iter()
            .map(|(x, w)| (x.iter().zip(v).map(|(a, b)| a + b).collect(), w))
            .collect();
        Self::new(self.dim, mode, raw)
    }

    pub fn sum_of(dim: usize, mode: MeasureMode, parts: &[&PlanarAtomicMeasure]) -> Result<Self> {
        let mut raw = Vec::new();
        for p in parts {
            check_dim(dim, p.dim)?;
            raw.extend(p.raw());
        }
        Self::new(dim, mode, raw)
    }

    pub fn restrict(&self, mode: MeasureMode, keep: impl Fn(&[f64]) -> bool) -> Result<Self> {
        let raw = self.raw().into_iter().filter(|(x, _)| keep(x)).collect();
        Self::new(self.dim, mode, raw)
    }
}

/// Push-forward of a planar atomic measure under the wrapping map.
///
/// With `opposite_second` the second coordinate is negated first. Atoms that
/// land on the identity are dropped for Levy measures.
pub fn wrap_pushforward(
    mu: &PlanarAtomicMeasure,
    opposite_second: bool,
) -> Result<AtomicTorusMeasure> {
    if opposite_second {
        check_dim(2, mu.dim())?;
    }
    let mut raw = Vec::with_capacity(mu.atoms().len());
    for a in mu.atoms() {
        let mut theta: Vec<f64> = a.x.iter().copied().map(canonicalize).collect();
        if opposite_second {
            theta[1] = canonicalize(-a.x[1]);
        }
        if mu.mode() == MeasureMode::Levy && theta.iter().all(|&t| t == 0.0) {
            continue;
        }
        raw.push((theta, a.w));
    }
    AtomicTorusMeasure::new(mu.dim(), mu.mode(), raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn merges_bitwise_equal_atoms() {
        let m = AtomicTorusMeasure::new(
            1,
            MeasureMode::Probability,
            vec![(vec![PI], 0.25), (vec![-PI], 0.25), (vec![1.0], 0.5)],
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].w, 0.5);
    }

    #[test]
    fn levy_mode_rejects_identity_atom() {
        let err = AtomicTorusMeasure::new(2, MeasureMode::Levy, vec![(vec![0.0, 2.0 * PI], 1.0)]);
        assert!(matches!(err, Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn probability_mass_checked() {
        assert!(
            AtomicTorusMeasure::new(1, MeasureMode::Probability, vec![(vec![0.0], 0.9)]).is_err()
        );
    }

    #[test]
    fn wrap_full_turn_lands_on_zero() {
        let mu = PlanarAtomicMeasure::new(
            2,
            MeasureMode::Probability,
            vec![(vec![2.0 * PI, -FRAC_PI_2], 1.0)],
        )
        .unwrap();
        let w = wrap_pushforward(&mu, false).unwrap();
        assert_eq!(w.atoms()[0].theta[0].value(), 0.0);
        assert_eq!(w.atoms()[0].theta[1].value(), -FRAC_PI_2);
        let lev = PlanarAtomicMeasure::new(2, MeasureMode::Levy, vec![(vec![2.0 * PI, 0.0], 1.0)])
            .unwrap();
        assert!(wrap_pushforward(&lev, false).unwrap().is_empty());
    }

    #[test]
    fn opposite_wrap_negates_second_frequency() {
        let mu = PlanarAtomicMeasure::new(2, MeasureMode::Probability, vec![(vec![0.3, 0.7], 1.0)])
            .unwrap();
        let w = wrap_pushforward(&mu, true).unwrap();
        let lhs = w.moment(&[2, 3]).unwrap();
        let rhs = mu.char(&[2.0, -3.0]).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
