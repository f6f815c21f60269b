//! Idempotent distributions on the bi-torus and moment-pattern detection of
//! idempotent factors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::measures::{kappa_moment, MomentMeasure};

/// Default moment cutoff.
pub const DEFAULT_K: i64 = 10;
/// Tolerance for moment pattern matching.
pub const PATTERN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdempotentKind {
    TrivialDirac,
    /// `m × δ_1`.
    HaarLeft,
    /// `δ_1 × m`.
    HaarRight,
    /// `m × m`.
    HaarBoth,
    BiHaarP,
    /// The idempotent of the opposite convolution.
    BiHaarPStar,
    None,
}

impl IdempotentKind {
    pub const ALL: [IdempotentKind; 6] = [
        IdempotentKind::TrivialDirac,
        IdempotentKind::HaarLeft,
        IdempotentKind::HaarRight,
        IdempotentKind::HaarBoth,
        IdempotentKind::BiHaarP,
        IdempotentKind::BiHaarPStar,
    ];

    /// Canonical measure of this kind; `None` has none.
    pub fn measure(self) -> Option<MomentMeasure> {
        let delta = || MomentMeasure::identity(1);
        Some(match self {
            IdempotentKind::TrivialDirac => MomentMeasure::identity(2),
            IdempotentKind::HaarLeft => MomentMeasure::product(MomentMeasure::Haar, delta()),
            IdempotentKind::HaarRight => MomentMeasure::product(delta(), MomentMeasure::Haar),
            IdempotentKind::HaarBoth => {
                MomentMeasure::product(MomentMeasure::Haar, MomentMeasure::Haar)
            }
            IdempotentKind::BiHaarP => MomentMeasure::BiHaarP,
            IdempotentKind::BiHaarPStar => MomentMeasure::BiHaarPStar,
            IdempotentKind::None => return None,
        })
    }

    fn pattern(self, p: i64, q: i64) -> f64 {
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            IdempotentKind::TrivialDirac => 1.0,
            IdempotentKind::HaarLeft => ind(p == 0),
            IdempotentKind::HaarRight => ind(q == 0),
            IdempotentKind::HaarBoth => ind(p == 0 && q == 0),
            IdempotentKind::BiHaarP => ind(p == q),
            IdempotentKind::BiHaarPStar => ind(p == -q),
            IdempotentKind::None => f64::NAN,
        }
    }
}

fn require_bitorus(m: &MomentMeasure) -> Result<()> {
    check_dim(2, m.dim())
}

fn require_k(k: i64) -> Result<()> {
    if k < 1 {
        return Err(Error::Precondition(
            "moment cutoff K must be at least 1".into(),
        ));
    }
    Ok(())
}

fn matches(m: &MomentMeasure, k: i64, f: impl Fn(i64, i64) -> Complex64) -> Result<bool> {
    for p in -k..=k {
        for q in -k..=k {
            if (m.moment(&[p, q])? - f(p, q)).norm() > PATTERN_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Matches the moments `|p|, |q| ≤ K` against the idempotent patterns.
pub fn classify_idempotent(m: &MomentMeasure, k: i64) -> Result<IdempotentKind> {
    require_bitorus(m)?;
    require_k(k)?;
    for kind in IdempotentKind::ALL {
        if matches(m, k, |p, q| Complex64::new(kind.pattern(p, q), 0.0))? {
            return Ok(kind);
        }
    }
    Ok(IdempotentKind::None)
}

/// Whether `m_{p,q} = δ_{p,q} m_{1,1}^p` on `[−K, K] × [0, K]`, with `0⁰ = 1`.
///
/// When true the measure is `P ⊛ (κ_c × δ_1)` with `c = m_{1,1}`.
pub fn has_p_factor(m: &MomentMeasure, k: i64) -> Result<(bool, Complex64)> {
    require_bitorus(m)?;
    require_k(k)?;
    let c = m.m11()?;
    for p in -k..=k {
        for q in 0..=k {
            let expected = if p == q {
                kappa_moment(c, p)
            } else {
                Complex64::new(0.0, 0.0)
            };
            if (m.moment(&[p, q])? - expected).norm() > PATTERN_TOL {
                return Ok((false, c));
            }
        }
    }
    Ok((true, c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PTimesReport {
    pub in_p_times: bool,
    pub m10: Complex64,
    pub m01: Complex64,
    pub m11: Complex64,
    /// Present when the caller asserts infinite divisibility and the measure
    /// has nonzero marginal means; then `m_{1,1}` must be nonzero.
    pub m11_nonzero: Option<bool>,
}

/// Whether both marginal means are nonzero.
pub fn in_p_times(m: &MomentMeasure) -> Result<bool> {
    Ok(in_p_times_report(m, false)?.in_p_times)
}

pub fn in_p_times_report(m: &MomentMeasure, assert_id: bool) -> Result<PTimesReport> {
    require_bitorus(m)?;
    let m10 = m.moment(&[1, 0])?;
    let m01 = m.moment(&[0, 1])?;
    let m11 = m.m11()?;
    let in_p_times = m10.norm() > PATTERN_TOL && m01.norm() > PATTERN_TOL;
    let m11_nonzero = (assert_id && in_p_times).then(|| m11.norm() > PATTERN_TOL);
    Ok(PTimesReport {
        in_p_times,
        m10,
        m01,
        m11,
        m11_nonzero,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IdException {
    /// `m × ν⁽²⁾`.
    HaarLeftForm,
    /// `ν⁽¹⁾ × m`.
    HaarRightForm,
    HaarBothForm,
    /// `P ⊛ (κ_c × δ_1)`.
    PKappaForm(Complex64),
    NotClassified,
}

/// Identifies which exceptional form an infinitely divisible measure outside
/// the nonzero-mean class takes.
pub fn classify_id_exception(m: &MomentMeasure, k: i64) -> Result<IdException> {
    require_bitorus(m)?;
    require_k(k)?;
    let zero = Complex64::new(0.0, 0.0);
    if matches(m, k, |p, q| {
        if p == 0 && q == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            zero
        }
    })? {
        return Ok(IdException::HaarBothForm);
    }
    if matches(m, k, |p, q| {
        if p == 0 {
            m.moment(&[0, q]).unwrap_or(zero)
        } else {
            zero
        }
    })? {
        return Ok(IdException::HaarLeftForm);
    }
    if matches(m, k, |p, q| {
        if q == 0 {
            m.moment(&[p, 0]).unwrap_or(zero)
        } else {
            zero
        }
    })? {
        return Ok(IdException::HaarRightForm);
    }
    let (p_factor, c) = has_p_factor(m, k)?;
    if p_factor {
        return Ok(IdException::PKappaForm(c));
    }
    Ok(IdException::NotClassified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{circ_convolve, flip_star};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn five_kinds_classify() {
        for kind in IdempotentKind::ALL {
            let m = kind.measure().unwrap();
            assert_eq!(classify_idempotent(&m, DEFAULT_K).unwrap(), kind);
        }
        let m = MomentMeasure::product(
            MomentMeasure::kappa(c(0.5, 0.0)).unwrap(),
            MomentMeasure::dirac(&[1.0]),
        );
        assert_eq!(
            classify_idempotent(&m, DEFAULT_K).unwrap(),
            IdempotentKind::None
        );
    }

    #[test]
    fn idempotents_are_fixed_points() {
        for kind in IdempotentKind::ALL {
            let m = kind.measure().unwrap();
            let sq = circ_convolve(&m, &m).unwrap();
            for (p, v) in m.moment_table(10) {
                assert_eq!(sq.moment(&p).unwrap(), v);
            }
        }
    }

    #[test]
    fn flip_of_p_is_p_star() {
        let f = flip_star(&MomentMeasure::BiHaarP).unwrap();
        assert_eq!(
            classify_idempotent(&f, DEFAULT_K).unwrap(),
            IdempotentKind::BiHaarPStar
        );
    }

    #[test]
    fn p_factor_detection() {
        let m = MomentMeasure::p_kappa(c(0.4, 0.0)).unwrap();
        let (ok, cc) = has_p_factor(&m, DEFAULT_K).unwrap();
        assert!(ok);
        assert!((cc - c(0.4, 0.0)).norm() < 1e-15);
        let hb = IdempotentKind::HaarBoth.measure().unwrap();
        assert_eq!(has_p_factor(&hb, DEFAULT_K).unwrap(), (true, c(0.0, 0.0)));
        let kk = MomentMeasure::kappa_product(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let (ok, cc) = has_p_factor(&kk, DEFAULT_K).unwrap();
        assert!(!ok);
        assert!((cc - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn p_times_membership() {
        let kk = MomentMeasure::kappa_product(c(0.3, 0.0), c(0.0, 0.7)).unwrap();
        let r = in_p_times_report(&kk, true).unwrap();
        assert!(r.in_p_times);
        assert_eq!(r.m11_nonzero, Some(true));
        assert!((r.m11 - c(0.0, 0.21)).norm() < 1e-15);
        assert!(!in_p_times(&IdempotentKind::HaarLeft.measure().unwrap()).unwrap());
        assert!(!in_p_times(&MomentMeasure::BiHaarP).unwrap());
    }

    #[test]
    fn exceptions() {
        let left = MomentMeasure::product(
            MomentMeasure::Haar,
            MomentMeasure::kappa(c(0.5, 0.0)).unwrap(),
        );
        assert_eq!(
            classify_id_exception(&left, DEFAULT_K).unwrap(),
            IdException::HaarLeftForm
        );
        let right = MomentMeasure::product(
            MomentMeasure::kappa(c(0.5, 0.0)).unwrap(),
            MomentMeasure::Haar,
        );
        assert_eq!(
            classify_id_exception(&right, DEFAULT_K).unwrap(),
            IdException::HaarRightForm
        );
        let pk = MomentMeasure::p_kappa(c(0.8, 0.0)).unwrap();
        match classify_id_exception(&pk, DEFAULT_K).unwrap() {
            IdException::PKappaForm(cc) => assert!((cc - c(0.8, 0.0)).norm() < 1e-15),
            other => panic!("{other:?}"),
        }
        let hb = IdempotentKind::HaarBoth.measure().unwrap();
        assert_eq!(
            classify_id_exception(&hb, DEFAULT_K).unwrap(),
            IdException::HaarBothForm
        );
        let kk = MomentMeasure::kappa_product(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert_eq!(
            classify_id_exception(&kk, DEFAULT_K).unwrap(),
            IdException::NotClassified
        );
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(classify_idempotent(&MomentMeasure::Haar, 3).is_err());
    }
}
