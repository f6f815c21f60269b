use num_complex::Complex64;

use super::triplet::{add_lk_char, triplet_convolve, wrap_triplet, AddLevyTriplet, MulLevyTriplet};
use crate::error::{check_dim, Error, Result};
use crate::measures::{circ_convolve, MomentMeasure};
use crate::numeric::integer_box;

/// A bi-free infinitely divisible law on the bi-torus, described by the
/// data that parameterizes it.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaDomainElement {
    /// Law of a bi-free triplet on the bi-torus.
    Triplet(MulLevyTriplet),
    /// `m × ν⁽²⁾`, with `ν⁽²⁾` given by its circle triplet.
    HaarLeft(MulLevyTriplet),
    /// `ν⁽¹⁾ × m`.
    HaarRight(MulLevyTriplet),
    /// `m × m`.
    HaarBoth,
    /// `P ⊠⊠ (κ_c × δ_1)`, `c ≠ 0`.
    PKappa(Complex64),
}

/// Image of the Γ map.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaImage {
    Triplet(MulLevyTriplet),
    Measure(MomentMeasure),
}

impl GammaImage {
    pub fn into_measure(self) -> MomentMeasure {
        match self {
            GammaImage::Triplet(t) => MomentMeasure::levy_khintchine(t),
            GammaImage::Measure(m) => m,
        }
    }

    pub fn char(&self, p: &[i64]) -> Result<Complex64> {
        match self {
            GammaImage::Triplet(t) => t.char(p),
            GammaImage::Measure(m) => m.moment(p),
        }
    }
}

impl GammaDomainElement {
    pub fn validate(&self) -> Result<()> {
        match self {
            GammaDomainElement::Triplet(t) => check_dim(2, t.dim()),
            GammaDomainElement::HaarLeft(t) | GammaDomainElement::HaarRight(t) => {
                check_dim(1, t.dim())
            }
            GammaDomainElement::HaarBoth => Ok(()),
            GammaDomainElement::PKappa(c) => {
                let r = c.norm();
                if r == 0.0 || !r.is_finite() || r > 1.0 + 1e-15 {
                    Err(Error::Precondition(format!(
                        "P-kappa parameter {c} must satisfy 0 < |c| <= 1"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// The homomorphism Γ from bi-free to classical infinitely divisible laws.
pub fn gamma_map(x: &GammaDomainElement) -> Result<GammaImage> {
    x.validate()?;
    Ok(match x {
        GammaDomainElement::Triplet(t) => GammaImage::Triplet(t.clone()),
        GammaDomainElement::HaarLeft(t) => GammaImage::Measure(MomentMeasure::product(
            MomentMeasure::Haar,
            MomentMeasure::levy_khintchine(t.clone()),
        )),
        GammaDomainElement::HaarRight(t) => GammaImage::Measure(MomentMeasure::product(
            MomentMeasure::levy_khintchine(t.clone()),
            MomentMeasure::Haar,
        )),
        GammaDomainElement::HaarBoth => GammaImage::Measure(MomentMeasure::product(
            MomentMeasure::Haar,
            MomentMeasure::Haar,
        )),
        GammaDomainElement::PKappa(c) => GammaImage::Measure(MomentMeasure::p_kappa(*c)?),
    })
}

/// Bi-free multiplicative convolution on the parameter side, for the
/// combinations with closed forms.
pub fn bifree_convolve(
    a: &GammaDomainElement,
    b: &GammaDomainElement,
) -> Result<GammaDomainElement> {
    use GammaDomainElement::*;
    a.validate()?;
    b.validate()?;
    Ok(match (a, b) {
        (HaarBoth, _) | (_, HaarBoth) => HaarBoth,
        (Triplet(x), Triplet(y)) => Triplet(triplet_convolve(x, y)?),
        (HaarLeft(x), HaarLeft(y)) => HaarLeft(triplet_convolve(x, y)?),
        (HaarRight(x), HaarRight(y)) => HaarRight(triplet_convolve(x, y)?),
        (HaarLeft(_), HaarRight(_)) | (HaarRight(_), HaarLeft(_)) => HaarBoth,
        (HaarLeft(x), Triplet(t)) | (Triplet(t), HaarLeft(x)) => {
            HaarLeft(triplet_convolve(x, &t.marginal(1)?)?)
        }
        (HaarRight(x), Triplet(t)) | (Triplet(t), HaarRight(x)) => {
            HaarRight(triplet_convolve(x, &t.marginal(0)?)?)
        }
        (PKappa(_), HaarLeft(_) | HaarRight(_)) | (HaarLeft(_) | HaarRight(_), PKappa(_)) => {
            HaarBoth
        }
        (PKappa(c), PKappa(d)) => PKappa(c * d),
        (PKappa(c), Triplet(t)) | (Triplet(t), PKappa(c)) => match t.as_kappa_pair() {
            Some((g1, g2)) => PKappa(c * g1 * g2),
            None => {
                return Err(Error::Unsupported(
                    "m11 of a general bi-free triplet law is not available in closed form".into(),
                ))
            }
        },
    })
}

/// `Γ(a) ⊛ Γ(b)` as a moment measure.
pub fn gamma_circ(a: &GammaDomainElement, b: &GammaDomainElement) -> Result<MomentMeasure> {
    circ_convolve(&gamma_map(a)?.into_measure(), &gamma_map(b)?.into_measure())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramReport {
    pub pmax: i64,
    pub points: usize,
    pub max_discrepancy: f64,
    pub worst_p: Vec<i64>,
}

impl DiagramReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_discrepancy < tol
    }
}

/// Compares the classical wrap of the additive law with Γ applied to the
/// bi-free wrap of its bi-free counterpart, over `‖p‖∞ ≤ pmax`.
pub fn diagram_check(t: &AddLevyTriplet, pmax: i64) -> Result<DiagramReport> {
    if pmax < 0 {
        return Err(Error::Precondition("pmax must be non-negative".into()));
    }
    let bifree_wrapped = GammaDomainElement::Triplet(wrap_triplet(t)?);
    let image = gamma_map(&bifree_wrapped)?;
    let mut report = DiagramReport {
        pmax,
        points: 0,
        max_discrepancy: 0.0,
        worst_p: vec![0; t.dim()],
    };
    for p in integer_box(t.dim(), pmax) {
        let u: Vec<f64> = p.iter().map(|&x| x as f64).collect();
        let lhs = add_lk_char(t, &u)?;
        let rhs = image.char(&p)?;
        let err = (lhs - rhs).norm();
        report.points += 1;
        if err > report.max_discrepancy {
            report.max_discrepancy = err;
            report.worst_p = p;
        }
    }
    Ok(report)
}
