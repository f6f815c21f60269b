//! Small numeric helpers shared across modules.

use num_complex::Complex64;

/// Neumaier compensated accumulator.
///
/// Summation happens in the order values are pushed, so the result is
/// reproducible for a fixed input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated accumulator for complex values (real and imaginary parts
/// accumulated independently).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of an iterator of reals.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

/// Compensated sum of an iterator of complex numbers.
pub fn csum(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    values.into_iter().collect::<ComplexSum>().value()
}

/// `e^{i x}`.
#[inline]
pub fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

/// Integer-vector inner product with a real vector, `Σ p_j x_j`.
#[inline]
pub fn dot_int(p: &[i64], x: &[f64]) -> f64 {
    sum(p.iter().zip(x).map(|(&pj, &xj)| pj as f64 * xj))
}

/// `Σ u_j x_j` for real vectors.
#[inline]
pub fn dot(u: &[f64], x: &[f64]) -> f64 {
    sum(u.iter().zip(x).map(|(a, b)| a * b))
}

/// Quadratic form `⟨A p, p⟩` for a square matrix stored row-major.
pub fn quad_form(a: &[Vec<f64>], p: &[f64]) -> f64 {
    sum(a.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .map(move |(j, &aij)| aij * p[i] * p[j])
    }))
}

/// Enumerates every integer vector of length `dim` in the box `‖p‖∞ ≤ pmax`,
/// in lexicographic order.
pub fn integer_box(dim: usize, pmax: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (2 * pmax as usize + 1));
        for prefix in &out {
            for v in -pmax..=pmax {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}
