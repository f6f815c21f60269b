use num_complex::Complex64;

use super::one::TruncSeries1;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Σ-transform from moments `m₁..m_K`.
///
/// With `ψ = Σ m_k z^k` and `η = ψ/(1+ψ)`, returns `η^{⟨−1⟩}(z)/z`, known
/// through degree `K − 1`.
pub fn sigma_from_moments(m: &[Complex64]) -> Result<TruncSeries1> {
    let k = m.len();
    if k == 0 {
        return Err(Error::Precondition(
            "at least one moment is required".into(),
        ));
    }
    if m[0] == ZERO {
        return Err(Error::ZeroMean);
    }
    let psi = TruncSeries1::from_fn(k, |i| if i == 0 { ZERO } else { m[i - 1] });
    let one = TruncSeries1::one(k);
    let eta = psi.div(&(&one + &psi))?;
    let inv = eta.revert()?;
    Ok(TruncSeries1::from_fn(k - 1, |i| inv.coeff(i + 1)))
}

/// Moments `m₁..m_K` from a Σ-transform known through degree `K − 1`.
pub fn moments_from_sigma(sigma: &TruncSeries1) -> Result<Vec<Complex64>> {
    if sigma.coeff(0) == ZERO {
        return Err(Error::ZeroMean);
    }
    let k = sigma.k() + 1;
    let chi = TruncSeries1::from_fn(k, |i| if i == 0 { ZERO } else { sigma.coeff(i - 1) });
    let eta = chi.revert()?;
    let one = TruncSeries1::one(k);
    let psi = eta.div(&(&one - &eta))?;
    Ok((1..=k).map(|i| psi.coeff(i)).collect())
}

/// Moments of the free multiplicative convolution through degree `K`.
pub fn free_mul_convolve(ma: &[Complex64], mb: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    if ma.len() < k || mb.len() < k {
        return Err(Error::Precondition(format!(
            "need {k} moments of each factor"
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let sa = sigma_from_moments(&ma[..k])?;
    let sb = sigma_from_moments(&mb[..k])?;
    moments_from_sigma(&(&sa * &sb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_sigma_is_constant() {
        let c = Complex64::new(0.7, 0.0);
        let m: Vec<Complex64> = (1..=8).map(|k| c.powi(k)).collect();
        let s = sigma_from_moments(&m).unwrap();
        assert!((s.coeff(0) - c.inv()).norm() < 1e-14);
        assert!((1..=s.k()).all(|i| s.coeff(i).norm() < 1e-13));
    }

    #[test]
    fn zero_mean_rejected() {
        let m = vec![ZERO, Complex64::new(0.5, 0.0)];
        assert_eq!(sigma_from_moments(&m), Err(Error::ZeroMean));
    }
}
