use num_complex::Complex64;

use super::angle::Angle;
use super::atomic::{AtomicTorusMeasure, MeasureMode};
use crate::error::{check_dim, Error, Result};
use crate::levy::MulLevyTriplet;
use crate::numeric::cis;

/// A probability measure on a torus given by a closed-form moment oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentMeasure {
    Atomic(AtomicTorusMeasure),
    Dirac(Vec<Angle>),
    /// Haar measure on the circle.
    Haar,
    /// Bi-Haar measure with `m_{p,q} = [p = q]`.
    BiHaarP,
    /// Bi-Haar measure with `m_{p,q} = [p = −q]`.
    BiHaarPStar,
    /// Poisson-kernel measure on the circle, `|c| ≤ 1`.
    Kappa(Complex64),
    Product(Box<MomentMeasure>, Box<MomentMeasure>),
    Rotate(Box<MomentMeasure>, Vec<Angle>),
    Flip(Box<MomentMeasure>),
    /// Classical convolution of the factors, kept in a canonical order.
    CircConv(Vec<MomentMeasure>),
    /// Classical infinitely divisible law of a Levy triplet.
    LevyKhintchine(Box<MulLevyTriplet>),
}

/// `c^p` for `p ≥ 0` and `c̄^{|p|}` for `p < 0`, by binary powering.
pub fn kappa_moment(c: Complex64, p: i64) -> Complex64 {
    let base = if p >= 0 { c } else { c.conj() };
    let mut e = p.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

impl MomentMeasure {
    pub fn atomic(m: AtomicTorusMeasure) -> Result<Self> {
        if m.mode() != MeasureMode::Probability {
            return Err(Error::InvalidMeasure(
                "moment measures must be probability measures".into(),
            ));
        }
        Ok(MomentMeasure::Atomic(m))
    }

    pub fn dirac(theta: &[f64]) -> Self {
        MomentMeasure::Dirac(theta.iter().copied().map(Angle::new).collect())
    }

    /// `δ_1` on the torus of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        MomentMeasure::Dirac(vec![Angle::ZERO; dim])
    }

    pub fn kappa(c: Complex64) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) || c.norm() > 1.0 + 1e-15 {
            return Err(Error::InvalidMeasure(format!(
                "kappa parameter {c} lies outside the closed unit disc"
            )));
        }
        Ok(MomentMeasure::Kappa(c))
    }

    pub fn product(a: MomentMeasure, b: MomentMeasure) -> Self {
        MomentMeasure::Product(Box::new(a), Box::new(b))
    }

    /// `κ_c × κ_d`.
    pub fn kappa_product(c: Complex64, d: Complex64) -> Result<Self> {
        Ok(Self::product(Self::kappa(c)?, Self::kappa(d)?))
    }

    /// `P ⊛ (κ_c × δ_1)`; exactly `P` when `c = 1`.
    pub fn p_kappa(c: Complex64) -> Result<Self> {
        if c == Complex64::new(1.0, 0.0) {
            return Ok(MomentMeasure::BiHaarP);
        }
        circ_convolve(
            &MomentMeasure::BiHaarP,
            &Self::product(Self::kappa(c)?, Self::identity(1)),
        )
    }

    pub fn levy_khintchine(t: MulLevyTriplet) -> Self {
        MomentMeasure::LevyKhintchine(Box::new(t))
    }

    pub fn dim(&self) -> usize {
        match self {
            MomentMeasure::Atomic(m) => m.dim(),
            MomentMeasure::Dirac(t) => t.len(),
            MomentMeasure::Haar | MomentMeasure::Kappa(_) => 1,
            MomentMeasure::BiHaarP | MomentMeasure::BiHaarPStar | MomentMeasure::Flip(_) => 2,
            MomentMeasure::Product(a, b) => a.dim() + b.dim(),
            MomentMeasure::Rotate(m, _) => m.dim(),
            MomentMeasure::CircConv(f) => f.first().map_or(0, |m| m.dim()),
            MomentMeasure::LevyKhintchine(t) => t.dim(),
        }
    }

    /// Moment `m_p = ∫ s^p dν`.
    pub fn moment(&self, p: &[i64]) -> Result<Complex64> {
        check_dim(self.dim(), p.len())?;
        Ok(self.moment_unchecked(p))
    }

    pub(crate) fn moment_unchecked(&self, p: &[i64]) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        if p.iter().all(|&x| x == 0) {
            return one;
        }
        match self {
            MomentMeasure::Atomic(m) => m.moment_unchecked(p),
            MomentMeasure::Dirac(t) => rotation_factor(t, p),
            MomentMeasure::Haar => {
                if p[0] == 0 {
                    one
                } else {
                    zero
                }
            }
            MomentMeasure::BiHaarP => {
                if p[0] == p[1] {
                    one
                } else {
                    zero
                }
            }
            MomentMeasure::BiHaarPStar => {
                if p[0] == -p[1] {
                    one
                } else {
                    zero
                }
            }
            MomentMeasure::Kappa(c) => kappa_moment(*c, p[0]),
            MomentMeasure::Product(a, b) => {
                let (pa, pb) = p.split_at(a.dim());
                a.moment_unchecked(pa) * b.moment_unchecked(pb)
            }
            MomentMeasure::Rotate(m, beta) => rotation_factor(beta, p) * m.moment_unchecked(p),
            MomentMeasure::Flip(m) => m.moment_unchecked(&[p[0], -p[1]]),
            MomentMeasure::CircConv(factors) => {
                let mut acc = one;
                for f in factors {
                    acc *= f.moment_unchecked(p);
                }
                acc
            }
            MomentMeasure::LevyKhintchine(t) => t.char_unchecked(p),
        }
    }

    /// Moment table over the box `‖p‖∞ ≤ pmax` in lexicographic order.
    pub fn moment_table(&self, pmax: i64) -> Vec<(Vec<i64>, Complex64)> {
        crate::numeric::integer_box(self.dim(), pmax)
            .into_iter()
            .map(|p| {
                let v = self.moment_unchecked(&p);
                (p, v)
            })
            .collect()
    }

    /// `m_{1,1}` for measures on the bi-torus.
    pub fn m11(&self) -> Result<Complex64> {
        self.moment(&[1, 1])
    }

    pub(crate) fn is_identity(&self) -> bool {
        matches!(self, MomentMeasure::Dirac(t) if t.iter().all(|a| a.is_zero()))
    }

    fn order_key(&self) -> String {
        format!("{self:?}")
    }
}

/// `β^p = e^{i⟨p, arg β⟩}`.
fn rotation_factor(beta: &[Angle], p: &[i64]) -> Complex64 {
    let b: Vec<f64> = beta.iter().map(|a| a.value()).collect();
    cis(crate::numeric::dot_int(p, &b))
}

/// Classical convolution: moments multiply.
///
/// Nested convolutions are flattened and factors sorted by a canonical key,
/// so the result is independent of grouping and order. Identity factors are
/// dropped.
pub fn circ_convolve(a: &MomentMeasure, b: &MomentMeasure) -> Result<MomentMeasure> {
    check_dim(a.dim(), b.dim())?;
    let dim = a.dim();
    let mut factors = Vec::new();
    for m in [a, b] {
        match m {
            MomentMeasure::CircConv(f) => factors.extend(f.iter().cloned()),
            other => factors.push(other.clone()),
        }
    }
    factors.retain(|f| !f.is_identity());
    factors.sort_by_cached_key(|f| f.order_key());
    Ok(match factors.len() {
        0 => MomentMeasure::identity(dim),
        1 => factors.pop().expect("one factor"),
        _ => MomentMeasure::CircConv(factors),
    })
}

/// Rotation by `β`: `m_p ↦ β^p m_p`. A rotation that undoes the outermost
/// one returns the inner measure; other rotations nest.
pub fn rotate(m: &MomentMeasure, beta: &[f64]) -> Result<MomentMeasure> {
    check_dim(m.dim(), beta.len())?;
    if let MomentMeasure::Rotate(inner, b0) = m {
        if b0
            .iter()
            .zip(beta)
            .all(|(a, &b)| compose_angle(a.value(), b).is_zero())
        {
            return Ok((**inner).clone());
        }
    }
    let total: Vec<Angle> = beta.iter().copied().map(Angle::new).collect();
    if total.iter().all(|a| a.is_zero()) {
        return Ok(m.clone());
    }
    Ok(MomentMeasure::Rotate(Box::new(m.clone()), total))
}

/// `a + b` on the circle, snapped to zero when it cancels up to rounding of
/// the canonical representative.
fn compose_angle(a: f64, b: f64) -> Angle {
    let t = Angle::new(a + b);
    let scale = a.abs().max(b.abs()).max(std::f64::consts::PI);
    if t.value().abs() <= 4.0 * f64::EPSILON * scale {
        Angle::ZERO
    } else {
        t
    }
}

/// Coordinate flip `(s₁, s₂) ↦ (s₁, s̄₂)`; an involution.
pub fn flip_star(m: &MomentMeasure) -> Result<MomentMeasure> {
    check_dim(2, m.dim())?;
    Ok(match m {
        MomentMeasure::Flip(inner) => (**inner).clone(),
        MomentMeasure::BiHaarP => MomentMeasure::BiHaarPStar,
        MomentMeasure::BiHaarPStar => MomentMeasure::BiHaarP,
        other => MomentMeasure::Flip(Box::new(other.clone())),
    })
}

/// Closed forms recognised by the special bi-free convolution.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Special {
    /// Moments of `κ_c × κ_d`.
    KappaPair(Complex64, Complex64),
    /// Moments of `P ⊛ (κ_c × δ_1)`.
    PKappa(Complex64),
}

fn kappa_like(m: &MomentMeasure) -> Option<Complex64> {
    match m {
        MomentMeasure::Kappa(c) => Some(*c),
        MomentMeasure::Haar => Some(Complex64::new(0.0, 0.0)),
        MomentMeasure::Dirac(t) if t.len() == 1 => Some(t[0].point()),
        MomentMeasure::Rotate(inner, b) if b.len() == 1 => {
            kappa_like(inner).map(|c| c * b[0].point())
        }
        MomentMeasure::CircConv(f) if f.first().map(|x| x.dim()) == Some(1) => {
            f.iter().try_fold(Complex64::new(1.0, 0.0), |acc, x| {
                kappa_like(x).map(|c| acc * c)
            })
        }
        MomentMeasure::LevyKhintchine(t) if t.dim() == 1 => t.as_kappa(),
        _ => None,
    }
}

fn recognize(m: &MomentMeasure) -> Option<Special> {
    use Special::*;
    match m {
        MomentMeasure::Dirac(t) if t.len() == 2 => Some(KappaPair(t[0].point(), t[1].point())),
        MomentMeasure::BiHaarP => Some(PKappa(Complex64::new(1.0, 0.0))),
        MomentMeasure::Product(a, b) if a.dim() == 1 && b.dim() == 1 => {
            Some(KappaPair(kappa_like(a)?, kappa_like(b)?))
        }
        MomentMeasure::Rotate(inner, b) if b.len() == 2 => match recognize(inner)? {
            KappaPair(c, d) => Some(KappaPair(c * b[0].point(), d * b[1].point())),
            PKappa(c) => Some(PKappa(c * b[0].point() * b[1].point())),
        },
        MomentMeasure::Flip(inner) => match recognize(inner)? {
            KappaPair(c, d) => Some(KappaPair(c, d.conj())),
            PKappa(_) => None,
        },
        MomentMeasure::CircConv(f) if f.first().map(|x| x.dim()) == Some(2) => {
            let mut acc = KappaPair(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
            for x in f {
                acc = match (acc, recognize(x)?) {
                    (KappaPair(c1, d1), KappaPair(c2, d2)) => KappaPair(c1 * c2, d1 * d2),
                    (KappaPair(c1, d1), PKappa(c2)) | (PKappa(c2), KappaPair(c1, d1)) => {
                        PKappa(c1 * d1 * c2)
                    }
                    (PKappa(c1), PKappa(c2)) => PKappa(c1 * c2),
                };
            }
            Some(acc)
        }
        MomentMeasure::LevyKhintchine(t) if t.dim() == 2 => {
            t.as_kappa_pair().map(|(c, d)| KappaPair(c, d))
        }
        _ => None,
    }
}

/// Bi-free multiplicative convolution on the bi-torus, restricted to the
/// classes with closed forms: products of Poisson kernels (Diracs and Haar
/// factors included) and `P ⊛ (κ_c × δ_1)`.
pub fn bifree_convolve_special(a: &MomentMeasure, b: &MomentMeasure) -> Result<MomentMeasure> {
    check_dim(2, a.dim())?;
    check_dim(2, b.dim())?;
    if a.is_identity() {
        return Ok(b.clone());
    }
    if b.is_identity() {
        return Ok(a.clone());
    }
    match (recognize(a), recognize(b)) {
        (Some(Special::KappaPair(c1, d1)), Some(Special::KappaPair(c2, d2))) => {
            MomentMeasure::kappa_product(c1 * c2, d1 * d2)
        }
        (_, Some(Special::KappaPair(..))) | (Some(Special::KappaPair(..)), _) => circ_convolve(a, b),
        (Some(Special::PKappa(c)), _) => MomentMeasure::p_kappa(c * b.m11()?),
        (_, Some(Special::PKappa(c))) => MomentMeasure::p_kappa(c * a.m11()?),
        (None, None) => Err(Error::Unsupported(
            "bi-free convolution has no closed form unless a factor is a Poisson-kernel product or carries a bi-Haar factor"
                .into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kappa_moments_and_conjugate_rule() {
        let k = MomentMeasure::kappa(c(0.0, 0.5)).unwrap();
        assert_eq!(k.moment(&[2]).unwrap(), c(-0.25, 0.0));
        assert_eq!(k.moment(&[-1]).unwrap(), c(0.0, -0.5));
        assert_eq!(k.moment(&[0]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn bi_haar_diagonal() {
        assert_eq!(MomentMeasure::BiHaarP.moment(&[3, 3]).unwrap(), c(1.0, 0.0));
        assert_eq!(MomentMeasure::BiHaarP.moment(&[3, 2]).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            MomentMeasure::BiHaarP.moment(&[1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn p_times_p_is_p() {
        let r = bifree_convolve_special(&MomentMeasure::BiHaarP, &MomentMeasure::BiHaarP).unwrap();
        assert_eq!(r, MomentMeasure::BiHaarP);
    }

    #[test]
    fn kappa_pairs_multiply() {
        let a = MomentMeasure::kappa_product(c(0.5, 0.0), c(0.9, 0.0)).unwrap();
        let b = MomentMeasure::kappa_product(c(0.0, 0.4), c(0.9, 0.0)).unwrap();
        let r = bifree_convolve_special(&a, &b).unwrap();
        let expect = MomentMeasure::kappa_product(c(0.0, 0.2), c(0.81, 0.0)).unwrap();
        for (p, v) in expect.moment_table(4) {
            assert!((r.moment(&p).unwrap() - v).norm() < 1e-15);
        }
    }

    #[test]
    fn general_pair_is_unsupported() {
        let nu = MomentMeasure::atomic(
            AtomicTorusMeasure::new(
                2,
                MeasureMode::Probability,
                vec![(vec![0.1, 0.2], 0.5), (vec![0.3, -1.0], 0.5)],
            )
            .unwrap(),
        )
        .unwrap();
        assert!(bifree_convolve_special(&nu, &nu)
            .unwrap_err()
            .is_unsupported());
    }

    #[test]
    fn rotation_round_trip_is_exact() {
        let k = MomentMeasure::kappa(c(0.3, 0.1)).unwrap();
        let r = rotate(&k, &[0.7]).unwrap();
        assert_eq!(rotate(&r, &[-0.7]).unwrap(), k);
    }
}
