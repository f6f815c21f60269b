use num_complex::Complex64;

use super::kernel::{kernel_integral, DEFAULT_QUADRATURE_POINTS};
use crate::error::{check_dim, Error, Result};
use crate::measures::{
    canonicalize, values, wrap_pushforward, Angle, AtomicTorusMeasure, MeasureMode,
    PlanarAtomicMeasure,
};
use crate::numeric::{dot, dot_int, quad_form, sum, ComplexSum};

/// Tolerance on the smallest eigenvalue of a Gaussian covariance matrix.
pub const PSD_TOL: f64 = -1e-12;

/// Levy measure of a multiplicative triplet.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasureT {
    Atomic(AtomicTorusMeasure),
    /// `ρ(ds) = scale/(1 − Re s) dm(s)` on the circle.
    HaarKernelDensity {
        scale: f64,
    },
}

impl LevyMeasureT {
    pub fn zero(dim: usize) -> Self {
        LevyMeasureT::Atomic(AtomicTorusMeasure::zero(dim, MeasureMode::Levy))
    }

    pub fn as_atomic(&self) -> Option<&AtomicTorusMeasure> {
        match self {
            LevyMeasureT::Atomic(m) => Some(m),
            LevyMeasureT::HaarKernelDensity { .. } => None,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            LevyMeasureT::Atomic(m) => m.is_empty(),
            LevyMeasureT::HaarKernelDensity { scale } => *scale == 0.0,
        }
    }
}

/// Checks that `a` is a symmetric positive semidefinite `d × d` matrix.
pub fn validate_psd(a: &[Vec<f64>], d: usize) -> Result<()> {
    check_dim(d, a.len())?;
    for row in a {
        check_dim(d, row.len())?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTriplet(
                "matrix has non-finite entries".into(),
            ));
        }
    }
    for i in 0..d {
        for j in 0..i {
            let scale = a[i][j].abs().max(a[j][i].abs()).max(1.0);
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                return Err(Error::InvalidTriplet("matrix is not symmetric".into()));
            }
        }
    }
    let min_eig = match d {
        1 => a[0][0],
        2 => {
            let (p, q, r) = (a[0][0], a[0][1], a[1][1]);
            let mean = 0.5 * (p + r);
            let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            mean - rad
        }
        _ => {
            let m = nalgebra::DMatrix::from_fn(d, d, |i, j| a[i][j]);
            m.symmetric_eigen().eigenvalues.min()
        }
    };
    if min_eig < PSD_TOL {
        return Err(Error::InvalidTriplet(format!(
            "matrix is not positive semidefinite (eigenvalue {min_eig})"
        )));
    }
    Ok(())
}

/// `(γ, A, ρ)` on the torus of dimension `d`, with `γ = e^{i·gamma_arg}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MulLevyTriplet {
    gamma_arg: Vec<Angle>,
    a: Vec<Vec<f64>>,
    rho: LevyMeasureT,
}

/// Real and imaginary parts of `e^{iφ} − 1 − i c`, computed without
/// cancellation for small `φ`.
#[inline]
fn compensated_phase(phi: f64, c: f64) -> Complex64 {
    let h = (0.5 * phi).sin();
    Complex64::new(-2.0 * h * h, phi.sin() - c)
}

impl MulLevyTriplet {
    pub fn new(gamma_arg: &[f64], a: Vec<Vec<f64>>, rho: LevyMeasureT) -> Result<Self> {
        let d = gamma_arg.len();
        if d == 0 {
            return Err(Error::InvalidTriplet("dimension must be positive".into()));
        }
        if gamma_arg.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTriplet("drift has non-finite entries".into()));
        }
        validate_psd(&a, d)?;
        let rho = match rho {
            LevyMeasureT::Atomic(m) => {
                check_dim(d, m.dim())?;
                let m = if m.mode() == MeasureMode::Levy {
                    m
                } else {
                    m.into_mode(MeasureMode::Levy)
                        .map_err(|e| Error::InvalidTriplet(e.to_string()))?
                };
                LevyMeasureT::Atomic(m)
            }
            LevyMeasureT::HaarKernelDensity { scale } => {
                if d != 1 {
                    return Err(Error::InvalidTriplet(
                        "the Haar-kernel density form exists only on the circle".into(),
                    ));
                }
                if !scale.is_finite() || scale < 0.0 {
                    return Err(Error::InvalidTriplet(format!(
                        "density scale {scale} must be non-negative"
                    )));
                }
                LevyMeasureT::HaarKernelDensity { scale }
            }
        };
        Ok(MulLevyTriplet {
            gamma_arg: gamma_arg.iter().copied().map(Angle::new).collect(),
            a,
            rho,
        })
    }

    /// `(1, 0, 0)` in dimension `d`.
    pub fn trivial(d: usize) -> Self {
        MulLevyTriplet {
            gamma_arg: vec![Angle::ZERO; d],
            a: vec![vec![0.0; d]; d],
            rho: LevyMeasureT::zero(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma_arg.len()
    }

    pub fn gamma_arg(&self) -> &[Angle] {
        &self.gamma_arg
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn rho(&self) -> &LevyMeasureT {
        &self.rho
    }

    /// `I(p)`, the Levy-measure part of the exponent.
    pub fn levy_integral(&self, p: &[i64]) -> Complex64 {
        match &self.rho {
            LevyMeasureT::Atomic(m) => {
                let mut acc = ComplexSum::new();
                for atom in m.atoms() {
                    let theta = values(&atom.theta);
                    let phi = dot_int(p, &theta);
                    let c = sum(p.iter().zip(&theta).map(|(&pj, t)| pj as f64 * t.sin()));
                    acc.add(compensated_phase(phi, c) * atom.w);
                }
                acc.value()
            }
            LevyMeasureT::HaarKernelDensity { scale } => {
                Complex64::new(-scale * p[0].unsigned_abs() as f64, 0.0)
            }
        }
    }

    /// `i⟨p, arg γ⟩ − ½⟨Ap,p⟩ + I(p)`.
    pub fn exponent(&self, p: &[i64]) -> Result<Complex64> {
        check_dim(self.dim(), p.len())?;
        Ok(self.exponent_unchecked(p))
    }

    pub(crate) fn exponent_unchecked(&self, p: &[i64]) -> Complex64 {
        let pf: Vec<f64> = p.iter().map(|&x| x as f64).collect();
        let drift = dot_int(p, &values(&self.gamma_arg));
        let gauss = 0.5 * quad_form(&self.a, &pf);
        Complex64::new(-gauss, drift) + self.levy_integral(p)
    }

    /// Characteristic function `exp(exponent(p))`.
    pub fn char(&self, p: &[i64]) -> Result<Complex64> {
        check_dim(self.dim(), p.len())?;
        Ok(self.char_unchecked(p))
    }

    pub(crate) fn char_unchecked(&self, p: &[i64]) -> Complex64 {
        if p.iter().all(|&x| x == 0) {
            return Complex64::new(1.0, 0.0);
        }
        self.exponent_unchecked(p).exp()
    }

    /// Exponent with the density part evaluated by periodic-trapezoid
    /// quadrature of the kernel on `n` points.
    pub fn exponent_quadrature(&self, p: &[i64], n: usize) -> Result<Complex64> {
        check_dim(self.dim(), p.len())?;
        match &self.rho {
            LevyMeasureT::HaarKernelDensity { scale } => {
                let pf = p[0] as f64;
                let base = Complex64::new(
                    -0.5 * self.a[0][0] * pf * pf,
                    pf * self.gamma_arg[0].value(),
                );
                Ok(base + kernel_integral(p[0], n) * (*scale / std::f64::consts::TAU))
            }
            LevyMeasureT::Atomic(_) => self.exponent(p),
        }
    }

    pub fn exponent_quadrature_default(&self, p: &[i64]) -> Result<Complex64> {
        self.exponent_quadrature(p, DEFAULT_QUADRATURE_POINTS)
    }

    /// `c` with `ν = κ_c` when this circle triplet is a Poisson kernel law.
    pub(crate) fn as_kappa(&self) -> Option<Complex64> {
        if self.dim() != 1 || self.a[0][0] != 0.0 {
            return None;
        }
        let g = self.gamma_arg[0].point();
        match &self.rho {
            LevyMeasureT::Atomic(m) if m.is_empty() => Some(g),
            LevyMeasureT::HaarKernelDensity { scale } => Some(g * (-scale).exp()),
            _ => None,
        }
    }

    /// `(γ₁, γ₂)` when the triplet is the point mass `δ_γ` on the bi-torus.
    pub(crate) fn as_kappa_pair(&self) -> Option<(Complex64, Complex64)> {
        if self.dim() != 2 || !self.rho.is_zero() || self.a.iter().flatten().any(|&x| x != 0.0) {
            return None;
        }
        Some((self.gamma_arg[0].point(), self.gamma_arg[1].point()))
    }

    /// Triplet of the `j`-th marginal law.
    pub fn marginal(&self, j: usize) -> Result<MulLevyTriplet> {
        if j >= self.dim() {
            return Err(Error::Precondition(format!(
                "marginal index {j} out of range"
            )));
        }
        let rho = match &self.rho {
            LevyMeasureT::Atomic(m) => {
                let raw = m
                    .atoms()
                    .iter()
                    .filter(|a| !a.theta[j].is_zero())
                    .map(|a| (vec![a.theta[j].value()], a.w))
                    .collect();
                LevyMeasureT::Atomic(AtomicTorusMeasure::new(1, MeasureMode::Levy, raw)?)
            }
            other => other.clone(),
        };
        MulLevyTriplet::new(&[self.gamma_arg[j].value()], vec![vec![self.a[j][j]]], rho)
    }

    /// Triplet of the flipped law: `γ★`, `A^op`, `ρ★`.
    pub fn flip(&self) -> Result<MulLevyTriplet> {
        check_dim(2, self.dim())?;
        let mut a = self.a.clone();
        a[0][1] = -a[0][1];
        a[1][0] = -a[1][0];
        let rho = match &self.rho {
            LevyMeasureT::Atomic(m) => LevyMeasureT::Atomic(m.flip()?),
            other => other.clone(),
        };
        MulLevyTriplet::new(
            &[self.gamma_arg[0].value(), -self.gamma_arg[1].value()],
            a,
            rho,
        )
    }
}

pub fn mul_lk_exponent(t: &MulLevyTriplet, p: &[i64]) -> Result<Complex64> {
    t.exponent(p)
}

pub fn mul_lk_char(t: &MulLevyTriplet, p: &[i64]) -> Result<Complex64> {
    t.char(p)
}

/// `(v, A, τ)` on `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AddLevyTriplet {
    v: Vec<f64>,
    a: Vec<Vec<f64>>,
    tau: PlanarAtomicMeasure,
}

impl AddLevyTriplet {
    pub fn new(v: Vec<f64>, a: Vec<Vec<f64>>, tau: PlanarAtomicMeasure) -> Result<Self> {
        let d = v.len();
        if d == 0 {
            return Err(Error::InvalidTriplet("dimension must be positive".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTriplet("drift has non-finite entries".into()));
        }
        validate_psd(&a, d)?;
        check_dim(d, tau.dim())?;
        if tau.mode() != MeasureMode::Levy {
            return Err(Error::InvalidTriplet("tau must be a Levy measure".into()));
        }
        Ok(AddLevyTriplet { v, a, tau })
    }

    pub fn trivial(d: usize) -> Self {
        AddLevyTriplet {
            v: vec![0.0; d],
            a: vec![vec![0.0; d]; d],
            tau: PlanarAtomicMeasure::zero(d, MeasureMode::Levy),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn tau(&self) -> &PlanarAtomicMeasure {
        &self.tau
    }

    pub fn exponent(&self, u: &[f64]) -> Result<Complex64> {
        check_dim(self.dim(), u.len())?;
        let mut acc = ComplexSum::new();
        for atom in self.tau.atoms() {
            let phi = dot(u, &atom.x);
            let norm2 = dot(&atom.x, &atom.x);
            acc.add(compensated_phase(phi, phi / (1.0 + norm2)) * atom.w);
        }
        Ok(Complex64::new(-0.5 * quad_form(&self.a, u), dot(u, &self.v)) + acc.value())
    }

    pub fn char(&self, u: &[f64]) -> Result<Complex64> {
        if u.iter().all(|&x| x == 0.0) {
            check_dim(self.dim(), u.len())?;
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.exponent(u)?.exp())
    }

    /// Sum of triplets: the additive convolution semigroup law.
    pub fn add(&self, other: &AddLevyTriplet) -> Result<AddLevyTriplet> {
        check_dim(self.dim(), other.dim())?;
        let v = self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect();
        let a = add_matrices(&self.a, &other.a);
        let tau =
            PlanarAtomicMeasure::sum_of(self.dim(), MeasureMode::Levy, &[&self.tau, &other.tau])?;
        AddLevyTriplet::new(v, a, tau)
    }
}

pub fn add_lk_char(t: &AddLevyTriplet, u: &[f64]) -> Result<Complex64> {
    t.char(u)
}

fn add_matrices(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

/// Push-forward of an additive triplet under the wrapping map.
pub fn wrap_triplet(t: &AddLevyTriplet) -> Result<MulLevyTriplet> {
    let d = t.dim();
    let rho = wrap_pushforward(t.tau(), false)?;
    let gamma: Vec<f64> = (0..d)
        .map(|j| {
            let correction = t
                .tau()
                .integrate_real(|x| x[j].sin() - x[j] / (1.0 + dot(x, x)));
            canonicalize(sum([t.v()[j], correction]))
        })
        .collect();
    MulLevyTriplet::new(&gamma, t.a().to_vec(), LevyMeasureT::Atomic(rho))
}

/// Triplet sum: drifts add mod `2π`, matrices add, Levy measures add.
pub fn triplet_convolve(a: &MulLevyTriplet, b: &MulLevyTriplet) -> Result<MulLevyTriplet> {
    check_dim(a.dim(), b.dim())?;
    let d = a.dim();
    let gamma: Vec<f64> = a
        .gamma_arg
        .iter()
        .zip(&b.gamma_arg)
        .map(|(x, y)| x.value() + y.value())
        .collect();
    let rho = match (&a.rho, &b.rho) {
        (LevyMeasureT::Atomic(x), LevyMeasureT::Atomic(y)) => {
            LevyMeasureT::Atomic(AtomicTorusMeasure::sum_of(d, MeasureMode::Levy, &[x, y])?)
        }
        (
            LevyMeasureT::HaarKernelDensity { scale: s },
            LevyMeasureT::HaarKernelDensity { scale: r },
        ) => LevyMeasureT::HaarKernelDensity { scale: s + r },
        (x, y) if y.is_zero() => x.clone(),
        (x, y) if x.is_zero() => y.clone(),
        _ => {
            return Err(Error::Unsupported(
                "sum of an atomic and a density Levy measure has no finite representation".into(),
            ))
        }
    };
    MulLevyTriplet::new(&gamma, add_matrices(&a.a, &b.a), rho)
}

/// Triplet of `κ_c` for `0 < |c| ≤ 1`.
pub fn kappa_triplet(c: Complex64) -> Result<MulLevyTriplet> {
    let r = c.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::ZeroMean);
    }
    if r > 1.0 + 1e-15 {
        return Err(Error::Precondition(format!("|c| = {r} exceeds 1")));
    }
    let rho = if r >= 1.0 {
        LevyMeasureT::zero(1)
    } else {
        LevyMeasureT::HaarKernelDensity { scale: -r.ln() }
    };
    MulLevyTriplet::new(&[c.arg()], vec![vec![0.0]], rho)
}
