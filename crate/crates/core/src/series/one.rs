use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation degree.
pub const DEFAULT_K: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Power series in one variable truncated after degree `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries1 {
    coeffs: Vec<Complex64>,
}

impl TruncSeries1 {
    /// Series with the given coefficients, padded or cut to degree `k`.
    pub fn new(mut coeffs: Vec<Complex64>, k: usize) -> Self {
        coeffs.resize(k + 1, ZERO);
        TruncSeries1 { coeffs }
    }

    pub fn zero(k: usize) -> Self {
        TruncSeries1 {
            coeffs: vec![ZERO; k + 1],
        }
    }

    pub fn constant(c: Complex64, k: usize) -> Self {
        let mut s = Self::zero(k);
        s.coeffs[0] = c;
        s
    }

    pub fn one(k: usize) -> Self {
        Self::constant(ONE, k)
    }

    /// The variable `z`.
    pub fn var(k: usize) -> Self {
        let mut s = Self::zero(k);
        if k >= 1 {
            s.coeffs[1] = ONE;
        }
        s
    }

    pub fn from_fn(k: usize, f: impl Fn(usize) -> Complex64) -> Self {
        TruncSeries1 {
            coeffs: (0..=k).map(f).collect(),
        }
    }

    /// Truncation degree.
    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    pub fn set_coeff(&mut self, i: usize, v: Complex64) {
        if i < self.coeffs.len() {
            self.coeffs[i] = v;
        }
    }

    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.clone(), k)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncSeries1 {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_trunc(&self, other: &Self) -> Self {
        let k = self.k().min(other.k());
        let mut out = vec![ZERO; k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncSeries1 { coeffs: out }
    }

    /// Multiplicative inverse; requires a non-zero constant term.
    pub fn inv(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = ONE / a0;
        let k = self.k();
        let mut b = vec![ZERO; k + 1];
        b[0] = inv0;
        for n in 1..=k {
            let mut acc = ZERO;
            for j in 1..=n {
                acc += self.coeffs[j] * b[n - j];
            }
            b[n] = -acc * inv0;
        }
        Ok(TruncSeries1 { coeffs: b })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_trunc(&other.inv()?))
    }

    pub fn derivative(&self) -> Self {
        let k = self.k();
        Self::from_fn(k, |i| {
            if i < k {
                self.coeffs[i + 1] * (i as f64 + 1.0)
            } else {
                ZERO
            }
        })
    }

    /// `self ∘ f`; requires `f(0) = 0`.
    pub fn compose(&self, f: &Self) -> Result<Self> {
        if f.coeffs[0] != ZERO {
            return Err(Error::Precondition(
                "inner series of a composition must vanish at 0".into(),
            ));
        }
        let k = self.k().min(f.k());
        let f = f.truncate(k);
        let mut out = Self::constant(self.coeff(k), k);
        for i in (0..k).rev() {
            out = out.mul_trunc(&f);
            out.coeffs[0] += self.coeffs[i];
        }
        Ok(out)
    }

    /// Compositional inverse `g` with `self ∘ g = z`, by Newton iteration.
    pub fn revert(&self) -> Result<Self> {
        let k = self.k();
        if self.coeffs[0] != ZERO {
            return Err(Error::Precondition(
                "reverted series must vanish at 0".into(),
            ));
        }
        let f1 = self.coeff(1);
        if f1 == ZERO {
            return Err(Error::Precondition(
                "reverted series needs a non-zero linear term".into(),
            ));
        }
        let z = Self::var(k);
        let mut g = z.scale(ONE / f1);
        let df = self.derivative();
        let mut correct = 2usize;
        while correct <= k {
            let residual = &self.compose(&g)? - &z;
            let slope = df.compose(&g)?;
            g = &g - &residual.div(&slope)?;
            correct *= 2;
        }
        Ok(g)
    }

    pub fn exp(&self) -> Self {
        let k = self.k();
        let mut b = vec![ZERO; k + 1];
        b[0] = self.coeffs[0].exp();
        for n in 1..=k {
            let mut acc = ZERO;
            for j in 1..=n {
                acc += self.coeffs[j] * b[n - j] * j as f64;
            }
            b[n] = acc / n as f64;
        }
        TruncSeries1 { coeffs: b }
    }

    /// Logarithm with the principal branch on the constant term.
    pub fn log(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let k = self.k();
        let mut b = vec![ZERO; k + 1];
        b[0] = a0.ln();
        for n in 1..=k {
            let mut acc = ZERO;
            for j in 1..n {
                acc += b[j] * self.coeffs[n - j] * j as f64;
            }
            b[n] = (self.coeffs[n] - acc / n as f64) / a0;
        }
        Ok(TruncSeries1 { coeffs: b })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let k = self.k().max(other.k());
        (0..=k)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &TruncSeries1 {
    type Output = TruncSeries1;
    fn add(self, rhs: &TruncSeries1) -> TruncSeries1 {
        let k = self.k().min(rhs.k());
        TruncSeries1::from_fn(k, |i| self.coeffs[i] + rhs.coeffs[i])
    }
}

impl Sub for &TruncSeries1 {
    type Output = TruncSeries1;
    fn sub(self, rhs: &TruncSeries1) -> TruncSeries1 {
        let k = self.k().min(rhs.k());
        TruncSeries1::from_fn(k, |i| self.coeffs[i] - rhs.coeffs[i])
    }
}

impl Mul for &TruncSeries1 {
    type Output = TruncSeries1;
    fn mul(self, rhs: &TruncSeries1) -> TruncSeries1 {
        self.mul_trunc(rhs)
    }
}

impl Neg for &TruncSeries1 {
    type Output = TruncSeries1;
    fn neg(self) -> TruncSeries1 {
        self.scale(-ONE)
    }
}
