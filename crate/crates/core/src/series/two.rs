use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::one::TruncSeries1;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Power series in `z` and `w`, truncated after degree `K` in each variable.
///
/// Stored as rows indexed by the power of `z`; each row is a series in `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries2 {
    rows: Vec<TruncSeries1>,
}

impl TruncSeries2 {
    pub fn zero(k: usize) -> Self {
        TruncSeries2 {
            rows: vec![TruncSeries1::zero(k); k + 1],
        }
    }

    pub fn constant(c: Complex64, k: usize) -> Self {
        let mut s = Self::zero(k);
        s.rows[0] = TruncSeries1::constant(c, k);
        s
    }

    pub fn one(k: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), k)
    }

    /// Entry `(i, j)` is the coefficient of `z^i w^j`.
    pub fn from_fn(k: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        TruncSeries2 {
            rows: (0..=k)
                .map(|i| TruncSeries1::from_fn(k, |j| f(i, j)))
                .collect(),
        }
    }

    /// Embeds a series in `z`.
    pub fn from_z(s: &TruncSeries1) -> Self {
        let k = s.k();
        Self::from_fn(k, |i, j| if j == 0 { s.coeff(i) } else { ZERO })
    }

    /// Embeds a series in `w`.
    pub fn from_w(s: &TruncSeries1) -> Self {
        let k = s.k();
        Self::from_fn(k, |i, j| if i == 0 { s.coeff(j) } else { ZERO })
    }

    pub fn z(k: usize) -> Self {
        Self::from_z(&TruncSeries1::var(k))
    }

    pub fn w(k: usize) -> Self {
        Self::from_w(&TruncSeries1::var(k))
    }

    pub fn k(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.rows.get(i).map_or(ZERO, |r| r.coeff(j))
    }

    pub fn row(&self, i: usize) -> &TruncSeries1 {
        &self.rows[i]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncSeries2 {
            rows: self.rows.iter().map(|r| r.scale(c)).collect(),
        }
    }

    pub fn mul_trunc(&self, other: &Self) -> Self {
        let k = self.k().min(other.k());
        let mut rows = vec![TruncSeries1::zero(k); k + 1];
        for i in 0..=k {
            for j in 0..=(k - i) {
                let prod = self.rows[i].mul_trunc(&other.rows[j]);
                rows[i + j] = &rows[i + j] + &prod;
            }
        }
        TruncSeries2 { rows }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.coeff(0, 0) == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let k = self.k();
        let inv0 = self.rows[0].inv()?;
        let mut b: Vec<TruncSeries1> = Vec::with_capacity(k + 1);
        b.push(inv0.clone());
        for n in 1..=k {
            let mut acc = TruncSeries1::zero(k);
            for j in 1..=n {
                acc = &acc + &self.rows[j].mul_trunc(&b[n - j]);
            }
            b.push(-&acc.mul_trunc(&inv0));
        }
        Ok(TruncSeries2 { rows: b })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_trunc(&other.inv()?))
    }

    pub fn exp(&self) -> Self {
        let k = self.k();
        let mut b: Vec<TruncSeries1> = Vec::with_capacity(k + 1);
        b.push(self.rows[0].exp());
        for n in 1..=k {
            let mut acc = TruncSeries1::zero(k);
            for j in 1..=n {
                acc = &acc
                    + &self.rows[j]
                        .mul_trunc(&b[n - j])
                        .scale(Complex64::new(j as f64, 0.0));
            }
            b.push(acc.scale(Complex64::new(1.0 / n as f64, 0.0)));
        }
        TruncSeries2 { rows: b }
    }

    /// Logarithm with the principal branch on the constant term.
    pub fn log(&self) -> Result<Self> {
        if self.coeff(0, 0) == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let k = self.k();
        let inv0 = self.rows[0].inv()?;
        let mut b: Vec<TruncSeries1> = Vec::with_capacity(k + 1);
        b.push(self.rows[0].log()?);
        for n in 1..=k {
            let mut acc = TruncSeries1::zero(k);
            for j in 1..n {
                acc = &acc
                    + &b[j]
                        .mul_trunc(&self.rows[n - j])
                        .scale(Complex64::new(j as f64, 0.0));
            }
            let num = &self.rows[n] - &acc.scale(Complex64::new(1.0 / n as f64, 0.0));
            b.push(num.mul_trunc(&inv0));
        }
        Ok(TruncSeries2 { rows: b })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let k = self.k().max(other.k());
        let mut m: f64 = 0.0;
        for i in 0..=k {
            for j in 0..=k {
                m = m.max((self.coeff(i, j) - other.coeff(i, j)).norm());
            }
        }
        m
    }
}

impl Add for &TruncSeries2 {
    type Output = TruncSeries2;
    fn add(self, rhs: &TruncSeries2) -> TruncSeries2 {
        TruncSeries2 {
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &TruncSeries2 {
    type Output = TruncSeries2;
    fn sub(self, rhs: &TruncSeries2) -> TruncSeries2 {
        TruncSeries2 {
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &TruncSeries2 {
    type Output = TruncSeries2;
    fn mul(self, rhs: &TruncSeries2) -> TruncSeries2 {
        self.mul_trunc(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telescoping_product() {
        let k = 5;
        let one = TruncSeries2::one(k);
        let factor = &(&one - &TruncSeries2::z(k)) * &(&one - &TruncSeries2::w(k));
        let all_ones = TruncSeries2::from_fn(k, |_, _| Complex64::new(1.0, 0.0));
        let prod = &factor * &all_ones;
        assert!(prod.max_abs_diff(&one) == 0.0);
    }

    #[test]
    fn exponential_law() {
        let k = 6;
        let z = TruncSeries2::z(k);
        let w = TruncSeries2::w(k);
        let lhs = &z.exp() * &w.exp();
        let rhs = (&z + &w).exp();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
        assert!((&z + &w).exp().log().unwrap().max_abs_diff(&(&z + &w)) < 1e-15);
    }
}
