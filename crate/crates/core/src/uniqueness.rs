//! Uniqueness of multiplicative Levy measures on the circle: exact
//! Chebyshev arithmetic, verdicts for a single symmetric atom pair, and
//! numerical equivalence tests for Levy triplets.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::levy::{LevyMeasureT, MulLevyTriplet};
use crate::measures::{canonicalize, AtomicTorusMeasure, MeasureMode};
use crate::numeric::{sum, ComplexSum};

pub type Rational = BigRational;

/// Distance within which a floating angle is promoted to an exceptional one.
pub const ANGLE_SNAP: f64 = 1e-12;

/// Parses `a/b`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Precondition(format!("cannot parse {s:?} as a rational number"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(num, den);
        return Ok(if neg { -q } else { q });
    }
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (BigInt::from_str_radix(a, 10), BigInt::from_str_radix(b, 10));
            match (a, b) {
                (Ok(a), Ok(b)) if !b.is_zero() => Ok(Rational::new(a, b)),
                _ => Err(bad()),
            }
        }
        None => BigInt::from_str_radix(s, 10)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Chebyshev polynomial of the second kind, `U_0 = 1`, `U_1 = 2x`,
/// `U_{n+1} = 2x U_n − U_{n−1}`. Exact over [`Rational`].
pub fn chebyshev_u<T: Clone + Num>(n: usize, x: &T) -> T {
    let two_x = x.clone() + x.clone();
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two_x.clone();
    for _ in 1..n {
        let next = two_x.clone() * cur.clone() - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Whether the reduced denominator is a power of two.
pub fn is_dyadic(q: &Rational) -> bool {
    let d = q.denom().magnitude();
    d.count_ones() == 1
}

/// Weights `c` at `e^{iφ}` and `d` at `e^{−iφ}`, `φ ∈ (0, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomPair {
    pub phi: f64,
    pub c: f64,
    pub d: f64,
    /// Exact `cos φ` when known.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_rational"
    )]
    pub cos: Option<Rational>,
}

mod opt_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        q.as_ref().map(|q| q.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| super::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl AtomPair {
    pub fn new(phi: f64, c: f64, d: f64) -> Result<Self> {
        let p = AtomPair {
            phi,
            c,
            d,
            cos: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pair at `φ = arccos(cos)`, keeping `cos` exact.
    pub fn from_cos(cos: Rational, c: f64, d: f64) -> Result<Self> {
        if cos.abs() > Rational::one() || cos == Rational::one() {
            return Err(Error::Precondition(format!(
                "cos φ = {cos} must lie in [-1, 1)"
            )));
        }
        let phi = if cos == -Rational::one() {
            PI
        } else {
            rational_to_f64(&cos).acos()
        };
        let p = AtomPair {
            phi,
            c,
            d,
            cos: Some(cos),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 0.0 && self.d >= 0.0 && self.c.is_finite() && self.d.is_finite()) {
            return Err(Error::Precondition(
                "pair weights must be finite and nonnegative".into(),
            ));
        }
        if !(self.phi > 0.0 && self.phi <= PI) {
            return Err(Error::Precondition(format!(
                "angle {} must lie in (0, π]",
                self.phi
            )));
        }
        Ok(())
    }

    /// Total mass `c + d`.
    pub fn mass(&self) -> f64 {
        self.c + self.d
    }

    /// The Levy measure `c δ_{e^{iφ}} + d δ_{e^{−iφ}}`.
    pub fn measure(&self) -> Result<AtomicTorusMeasure> {
        AtomicTorusMeasure::new(
            1,
            MeasureMode::Levy,
            vec![(vec![self.phi], self.c), (vec![-self.phi], self.d)],
        )
    }
}

fn rational_to_f64(q: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// A finite Levy measure made of symmetric atom pairs with distinct angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricAtomPairMeasure {
    pub pairs: Vec<AtomPair>,
}

impl SymmetricAtomPairMeasure {
    pub fn new(pairs: Vec<AtomPair>) -> Result<Self> {
        for (i, p) in pairs.iter().enumerate() {
            p.validate()?;
            if pairs[..i].iter().any(|q| q.phi == p.phi) {
                return Err(Error::Precondition(format!(
                    "angle {} appears twice",
                    p.phi
                )));
            }
        }
        Ok(SymmetricAtomPairMeasure { pairs })
    }

    pub fn measure(&self) -> Result<AtomicTorusMeasure> {
        let atoms = self
            .pairs
            .iter()
            .flat_map(|p| [(vec![p.phi], p.c), (vec![-p.phi], p.d)])
            .collect();
        AtomicTorusMeasure::new(1, MeasureMode::Levy, atoms)
    }
}

/// The three angles at which a single pair can be reshuffled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExceptionalAngle {
    PiThird,
    HalfPi,
    TwoPiThirds,
}

impl ExceptionalAngle {
    pub const ALL: [ExceptionalAngle; 3] = [
        ExceptionalAngle::PiThird,
        ExceptionalAngle::HalfPi,
        ExceptionalAngle::TwoPiThirds,
    ];

    pub fn phi(self) -> f64 {
        match self {
            ExceptionalAngle::PiThird => PI / 3.0,
            ExceptionalAngle::HalfPi => PI / 2.0,
            ExceptionalAngle::TwoPiThirds => 2.0 * PI / 3.0,
        }
    }

    /// Exact `cos φ`.
    pub fn cos(self) -> Rational {
        match self {
            ExceptionalAngle::PiThird => Rational::new(1.into(), 2.into()),
            ExceptionalAngle::HalfPi => Rational::zero(),
            ExceptionalAngle::TwoPiThirds => Rational::new((-1).into(), 2.into()),
        }
    }

    /// Step `κ` by which mass moves between the two atoms.
    pub fn step(self) -> f64 {
        let r3 = 3f64.sqrt();
        match self {
            ExceptionalAngle::PiThird => TAU / r3,
            ExceptionalAngle::HalfPi => PI / 2.0,
            ExceptionalAngle::TwoPiThirds => TAU / (3.0 * r3),
        }
    }

    pub fn from_cos(cos: &Rational) -> Option<Self> {
        Self::ALL.into_iter().find(|a| &a.cos() == cos)
    }

    /// Exceptional angle within [`ANGLE_SNAP`] of `phi`.
    pub fn near(phi: f64) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|a| (a.phi() - phi).abs() <= ANGLE_SNAP)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UniquenessVerdict {
    Unique,
    Enumerated(Vec<AtomPair>),
    Unknown(String),
}

/// Decides L-uniqueness of a single pair.
pub fn l_unique_decide(pair: &AtomPair) -> Result<UniquenessVerdict> {
    pair.validate()?;
    if let Some(cos) = &pair.cos {
        if cos == &-Rational::one() {
            return Ok(UniquenessVerdict::Unique);
        }
        if !is_dyadic(cos) {
            return Ok(UniquenessVerdict::Unique);
        }
        if let Some(a) = ExceptionalAngle::from_cos(cos) {
            return Ok(UniquenessVerdict::Enumerated(levy_class_enumerate(
                a, pair.c, pair.d,
            )?));
        }
        return Ok(UniquenessVerdict::Unknown(format!(
            "no uniqueness result covers dyadic cos φ = {cos} outside the exceptional angles"
        )));
    }
    if (pair.phi - PI).abs() <= ANGLE_SNAP {
        if pair.phi != PI {
            log::warn!("angle {} promoted to π", pair.phi);
        }
        return Ok(UniquenessVerdict::Unique);
    }
    if let Some(a) = ExceptionalAngle::near(pair.phi) {
        if pair.phi != a.phi() {
            log::warn!(
                "angle {} promoted to the exceptional angle {}",
                pair.phi,
                a.phi()
            );
        }
        return Ok(UniquenessVerdict::Enumerated(levy_class_enumerate(
            a, pair.c, pair.d,
        )?));
    }
    Ok(UniquenessVerdict::Unknown(
        "the dyadic test needs cos φ as an exact rational".into(),
    ))
}

fn floor_guarded(x: f64) -> i64 {
    (x + 1e-12).floor() as i64
}

fn clean_weight(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

/// All pairs `(c − κℓ, d + κℓ)` with `−⌊d/κ⌋ ≤ ℓ ≤ ⌊c/κ⌋`.
pub fn levy_class_enumerate(angle: ExceptionalAngle, c: f64, d: f64) -> Result<Vec<AtomPair>> {
    if !(c >= 0.0 && d >= 0.0 && c.is_finite() && d.is_finite()) {
        return Err(Error::Precondition(
            "pair weights must be finite and nonnegative".into(),
        ));
    }
    let k = angle.step();
    let (lo, hi) = (-floor_guarded(d / k), floor_guarded(c / k));
    Ok((lo..=hi)
        .map(|l| {
            let (c1, d1) = if l == 0 {
                (c, d)
            } else {
                (
                    clean_weight(c - k * l as f64),
                    clean_weight(d + k * l as f64),
                )
            };
            AtomPair {
                phi: angle.phi(),
                c: c1.max(0.0),
                d: d1.max(0.0),
                cos: Some(angle.cos()),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equivalence {
    Equivalent,
    NotEquivalent,
}

/// The first check that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EquivWitness {
    Drift,
    Gaussian,
    /// Mass of the even set `{e^{±iφ}}` differs.
    EvenMass {
        phi: f64,
    },
    /// Imaginary exponents are not congruent mod `2π` at this `n`.
    Congruence {
        n: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivReport {
    pub verdict: Equivalence,
    pub witness: Option<EquivWitness>,
}

fn atomic_1d(t: &MulLevyTriplet) -> Result<&AtomicTorusMeasure> {
    check_dim(1, t.dim())?;
    match t.rho() {
        LevyMeasureT::Atomic(m) => Ok(m),
        LevyMeasureT::HaarKernelDensity { .. } => Err(Error::Unsupported(
            "equivalence tests need an atomic Levy measure".into(),
        )),
    }
}

fn dist_to_tau_lattice(x: f64) -> f64 {
    (x - TAU * (x / TAU).round()).abs()
}

/// Masses of the even sets `{e^{iφ}, e^{−iφ}}`, keyed by `|φ|`.
fn even_masses(m: &AtomicTorusMeasure) -> HashMap<u64, f64> {
    let mut out: HashMap<u64, f64> = HashMap::new();
    for a in m.atoms() {
        *out.entry(a.theta[0].value().abs().to_bits()).or_insert(0.0) += a.w;
    }
    out
}

/// `∫ Im(s^n − n s) dρ`.
fn im_exponent(m: &AtomicTorusMeasure, n: i64) -> f64 {
    sum(m.atoms().iter().map(|a| {
        let t = a.theta[0].value();
        a.w * ((n as f64 * t).sin() - n as f64 * t.sin())
    }))
}

/// Whether two triplets on the circle with atomic Levy measures define the
/// same law, tested through `n = N`.
pub fn triplet_equiv(
    t1: &MulLevyTriplet,
    t2: &MulLevyTriplet,
    n_max: i64,
    tol: f64,
) -> Result<EquivReport> {
    let (r1, r2) = (atomic_1d(t1)?, atomic_1d(t2)?);
    let fail = |w| {
        Ok(EquivReport {
            verdict: Equivalence::NotEquivalent,
            witness: Some(w),
        })
    };
    let g = t1.gamma_arg()[0].value() - t2.gamma_arg()[0].value();
    if dist_to_tau_lattice(g) >= tol {
        return fail(EquivWitness::Drift);
    }
    if (t1.a()[0][0] - t2.a()[0][0]).abs() >= tol {
        return fail(EquivWitness::Gaussian);
    }
    let (e1, e2) = (even_masses(r1), even_masses(r2));
    let mut keys: Vec<u64> = e1.keys().chain(e2.keys()).copied().collect();
    keys.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
    keys.dedup();
    for k in keys {
        let (a, b) = (
            e1.get(&k).copied().unwrap_or(0.0),
            e2.get(&k).copied().unwrap_or(0.0),
        );
        if (a - b).abs() >= tol {
            return fail(EquivWitness::EvenMass {
                phi: f64::from_bits(k),
            });
        }
    }
    let mass = r1.total_mass() + r2.total_mass();
    for n in 1..=n_max {
        let diff = im_exponent(r1, n) - im_exponent(r2, n);
        if dist_to_tau_lattice(diff) >= tol + n as f64 * mass * 8.0 * f64::EPSILON {
            return fail(EquivWitness::Congruence { n });
        }
    }
    Ok(EquivReport {
        verdict: Equivalence::Equivalent,
        witness: None,
    })
}

fn strict_exponent(m: &AtomicTorusMeasure, n: i64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for a in m.atoms() {
        let t = a.theta[0].value();
        let nt = n as f64 * t;
        acc.add(Complex64::new(nt.cos() - 1.0, nt.sin() - n as f64 * t.sin()) * a.w);
    }
    acc.value()
}

/// Whether `∫(s^n − 1 − i n Im s) dρ` agree for `|n| ≤ N` without reduction
/// mod `2π`, and the two measures agree atom by atom.
pub fn strict_unique_check(
    rho1: &AtomicTorusMeasure,
    rho2: &AtomicTorusMeasure,
    n_max: i64,
    tol: f64,
) -> Result<bool> {
    check_dim(1, rho1.dim())?;
    check_dim(1, rho2.dim())?;
    for n in -n_max..=n_max {
        if (strict_exponent(rho1, n) - strict_exponent(rho2, n)).norm() > tol {
            return Ok(false);
        }
    }
    let weights = |m: &AtomicTorusMeasure| -> HashMap<u64, f64> {
        m.atoms()
            .iter()
            .map(|a| (canonicalize(a.theta[0].value()).to_bits(), a.w))
            .collect()
    };
    let (w1, w2) = (weights(rho1), weights(rho2));
    Ok(w1.keys().chain(w2.keys()).all(|k| {
        (w1.get(k).copied().unwrap_or(0.0) - w2.get(k).copied().unwrap_or(0.0)).abs() <= tol
    }))
}

/// Exact determinant by fraction-preserving elimination.
pub fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= p.clone();
        for r in col + 1..n {
            let f = m[r][col].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = f.clone() * m[col][c].clone();
                m[r][c] -= v;
            }
        }
    }
    det
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetReport {
    pub det_a: Rational,
    pub closed_a: Rational,
    pub det_b: Rational,
    pub closed_b: Rational,
}

impl DetReport {
    pub fn holds(&self) -> bool {
        self.det_a == self.closed_a && self.det_b == self.closed_b
    }
}

/// Evaluates both Chebyshev determinant identities exactly.
pub fn det_identity_report(xs: &[Rational]) -> Result<DetReport> {
    let m = xs.len();
    if !(2..=4).contains(&m) {
        return Err(Error::Precondition(format!("need 2 to 4 points, got {m}")));
    }
    if xs.iter().any(|x| x.is_one()) {
        return Err(Error::Precondition("points must differ from 1".into()));
    }
    let row = |deg: usize| -> Vec<Rational> {
        let shift = Rational::from_integer(BigInt::from(deg + 1));
        xs.iter()
            .map(|x| chebyshev_u(deg, x) - shift.clone())
            .collect()
    };
    let a: Vec<Vec<Rational>> = (1..=m).map(row).collect();
    let mut b = a.clone();
    b[m - 1] = row(m + 1);
    let c_m = Rational::from_integer(num_traits::pow(BigInt::from(2), m * (m + 1) / 2));
    let mut common = c_m;
    for i in 0..m {
        for j in 0..i {
            common *= xs[i].clone() - xs[j].clone();
        }
        common *= xs[i].clone() - Rational::one();
    }
    let linear = xs.iter().fold(Rational::one(), |acc, x| acc + x.clone());
    let two = Rational::from_integer(BigInt::from(2));
    Ok(DetReport {
        det_a: rational_det(a),
        closed_a: common.clone(),
        det_b: rational_det(b),
        closed_b: two * linear * common,
    })
}

pub fn det_identity_check(xs: &[Rational]) -> Result<bool> {
    Ok(det_identity_report(xs)?.holds())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensatorReport {
    pub n_max: i64,
    pub max_discrepancy: f64,
    pub worst_n: i64,
}

/// `γ^n exp(−a n²/2 + ∫(s^n − 1 − i n [Im s + ½(Im s)³]) dρ)`.
pub fn alt_compensator_char(gamma_arg: f64, a: f64, rho: &AtomicTorusMeasure, n: i64) -> Complex64 {
    let nf = n as f64;
    let mut acc = ComplexSum::new();
    for at in rho.atoms() {
        let t = at.theta[0].value();
        let s = t.sin();
        let comp = nf * (s + 0.5 * s * s * s);
        acc.add(Complex64::new((nf * t).cos() - 1.0, (nf * t).sin() - comp) * at.w);
    }
    let e = acc.value() + Complex64::new(-0.5 * a * nf * nf, nf * gamma_arg);
    e.exp()
}

/// Compares `(1, 0, πδ_i)` with `(−1, 0, πδ_{−i})` under the cubic
/// compensator for `|n| ≤ 50`.
pub fn alt_compensator_demo() -> Result<CompensatorReport> {
    let n_max = 50;
    let r1 = AtomicTorusMeasure::new(1, MeasureMode::Levy, vec![(vec![PI / 2.0], PI)])?;
    let r2 = AtomicTorusMeasure::new(1, MeasureMode::Levy, vec![(vec![-PI / 2.0], PI)])?;
    let mut worst = (0, 0.0);
    for n in -n_max..=n_max {
        let d =
            (alt_compensator_char(0.0, 0.0, &r1, n) - alt_compensator_char(PI, 0.0, &r2, n)).norm();
        if d > worst.1 {
            worst = (n, d);
        }
    }
    Ok(CompensatorReport {
        n_max,
        max_discrepancy: worst.1,
        worst_n: worst.0,
    })
}
