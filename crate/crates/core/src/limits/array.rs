use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::levy::AddLevyTriplet;
use crate::measures::{
    canonicalize, wrap_pushforward, AtomicTorusMeasure, MeasureMode, PlanarAtomicMeasure,
};
use crate::numeric::dot;

/// Default centering cutoff.
pub const DEFAULT_THETA: f64 = 0.5;

/// Level `n` of a torus array: the shift `ξ_n` (as angles) and the row.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusRow {
    pub shift: Vec<f64>,
    pub measures: Vec<AtomicTorusMeasure>,
}

/// Level `n` of a planar array: the shift `v_n` and the row.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarRow {
    pub shift: Vec<f64>,
    pub measures: Vec<PlanarAtomicMeasure>,
}

pub type TorusGenerator = Arc<dyn Fn(u64) -> Result<TorusRow> + Send + Sync>;
pub type PlanarGenerator = Arc<dyn Fn(u64) -> Result<PlanarRow> + Send + Sync>;

#[derive(Clone)]
pub enum ArraySource {
    Torus(TorusGenerator),
    Planar(PlanarGenerator),
}

/// A triangular array given by a deterministic row generator.
#[derive(Clone)]
pub struct TriangularArray {
    dim: usize,
    theta: f64,
    source: ArraySource,
}

impl fmt::Debug for TriangularArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_torus() { "torus" } else { "planar" };
        f.debug_struct("TriangularArray")
            .field("kind", &kind)
            .field("dim", &self.dim)
            .field("theta", &self.theta)
            .finish()
    }
}

impl TriangularArray {
    pub fn torus(dim: usize, generator: TorusGenerator) -> Self {
        TriangularArray {
            dim,
            theta: DEFAULT_THETA,
            source: ArraySource::Torus(generator),
        }
    }

    pub fn planar(dim: usize, generator: PlanarGenerator) -> Self {
        TriangularArray {
            dim,
            theta: DEFAULT_THETA,
            source: ArraySource::Planar(generator),
        }
    }

    /// Sets the centering cutoff `θ ∈ (0, 1)`.
    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidArray(format!(
                "theta = {theta} must lie in (0, 1)"
            )));
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.source, ArraySource::Torus(_))
    }

    pub fn source(&self) -> &ArraySource {
        &self.source
    }

    pub fn torus_row(&self, n: u64) -> Result<TorusRow> {
        let ArraySource::Torus(g) = &self.source else {
            return Err(Error::Precondition(
                "operation requires a torus array".into(),
            ));
        };
        let row = g(n)?;
        check_dim(self.dim, row.shift.len())?;
        for m in &row.measures {
            check_dim(self.dim, m.dim())?;
            if m.mode() != MeasureMode::Probability {
                return Err(Error::InvalidArray(
                    "row entries must be probability measures".into(),
                ));
            }
        }
        Ok(row)
    }

    pub fn planar_row(&self, n: u64) -> Result<PlanarRow> {
        let ArraySource::Planar(g) = &self.source else {
            return Err(Error::Precondition(
                "operation requires a planar array".into(),
            ));
        };
        let row = g(n)?;
        check_dim(self.dim, row.shift.len())?;
        for m in &row.measures {
            check_dim(self.dim, m.dim())?;
            if m.mode() != MeasureMode::Probability {
                return Err(Error::InvalidArray(
                    "row entries must be probability measures".into(),
                ));
            }
        }
        Ok(row)
    }

    /// Row length `k_n`.
    pub fn k(&self, n: u64) -> Result<usize> {
        Ok(match &self.source {
            ArraySource::Torus(_) => self.torus_row(n)?.measures.len(),
            ArraySource::Planar(_) => self.planar_row(n)?.measures.len(),
        })
    }
}

fn usize_of(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::InvalidArray(format!("level {n} too large")))
}

/// Rows of `n` copies of `μ_n = ¼(δ_{±α_n} + δ_{±β_n})` with
/// `α_n = (√(2 det A), 0)/√(n a₂₂)` and `β_n = (√2 a₁₂, √2 a₂₂)/√(n a₂₂)`.
pub fn gaussian_planar(a: [[f64; 2]; 2]) -> Result<TriangularArray> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if a[0][1] != a[1][0] || a[1][1] <= 0.0 || a[0][0] < a[1][1] || det < 0.0 {
        return Err(Error::InvalidArray(
            "the Gaussian example needs a symmetric positive semidefinite A with a11 >= a22 > 0"
                .into(),
        ));
    }
    let gen = move |n: u64| -> Result<PlanarRow> {
        if n == 0 {
            return Err(Error::InvalidArray("levels start at n = 1".into()));
        }
        let s = (n as f64 * a[1][1]).sqrt();
        let alpha = [(2.0 * det).sqrt() / s, 0.0];
        let beta = [2f64.sqrt() * a[0][1] / s, 2f64.sqrt() * a[1][1] / s];
        let mu = PlanarAtomicMeasure::new(
            2,
            MeasureMode::Probability,
            vec![
                (alpha.to_vec(), 0.25),
                (vec![-alpha[0], -alpha[1]], 0.25),
                (beta.to_vec(), 0.25),
                (vec![-beta[0], -beta[1]], 0.25),
            ],
        )?;
        Ok(PlanarRow {
            shift: vec![0.0, 0.0],
            measures: vec![mu; usize_of(n)?],
        })
    };
    Ok(TriangularArray::planar(2, Arc::new(gen)))
}

/// Torus Gaussian example: the wrap of [`gaussian_planar`].
pub fn gaussian(a: [[f64; 2]; 2]) -> Result<TriangularArray> {
    wrap_array(&gaussian_planar(a)?)
}

/// Rows of `n` copies of `(1 − r/n)δ_0 + (r/n)μ`; defined for `n > r`.
pub fn poisson_planar(r: f64, jump: PlanarAtomicMeasure) -> Result<TriangularArray> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArray("rate must be positive".into()));
    }
    if jump.mode() != MeasureMode::Probability {
        return Err(Error::InvalidArray(
            "jump distribution must be a probability measure".into(),
        ));
    }
    let d = jump.dim();
    let gen = move |n: u64| -> Result<PlanarRow> {
        let q = r / n as f64;
        if !(q < 1.0) {
            return Err(Error::InvalidArray(format!(
                "level n = {n} must exceed the rate {r}"
            )));
        }
        let mut raw = vec![(vec![0.0; d], 1.0 - q)];
        raw.extend(jump.atoms().iter().map(|a| (a.x.clone(), q * a.w)));
        let mu = PlanarAtomicMeasure::new(d, MeasureMode::Probability, raw)?;
        Ok(PlanarRow {
            shift: vec![0.0; d],
            measures: vec![mu; usize_of(n)?],
        })
    };
    Ok(TriangularArray::planar(d, Arc::new(gen)))
}

/// Torus compound Poisson rows `(1 − r/n)δ_1 + (r/n)ν`.
pub fn poisson_torus(r: f64, jump: AtomicTorusMeasure) -> Result<TriangularArray> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArray("rate must be positive".into()));
    }
    if jump.mode() != MeasureMode::Probability {
        return Err(Error::InvalidArray(
            "jump distribution must be a probability measure".into(),
        ));
    }
    let d = jump.dim();
    let gen = move |n: u64| -> Result<TorusRow> {
        let q = r / n as f64;
        if !(q < 1.0) {
            return Err(Error::InvalidArray(format!(
                "level n = {n} must exceed the rate {r}"
            )));
        }
        let mut raw = vec![(vec![0.0; d], 1.0 - q)];
        for a in jump.atoms() {
            raw.push((a.theta.iter().map(|t| t.value()).collect(), q * a.w));
        }
        let nu = AtomicTorusMeasure::new(d, MeasureMode::Probability, raw)?;
        Ok(TorusRow {
            shift: vec![0.0; d],
            measures: vec![nu; usize_of(n)?],
        })
    };
    Ok(TriangularArray::torus(d, Arc::new(gen)))
}

/// Torus compound Poisson example: the wrap of [`poisson_planar`].
pub fn poisson(r: f64, jump: PlanarAtomicMeasure) -> Result<TriangularArray> {
    wrap_array(&poisson_planar(r, jump)?)
}

/// Planar array whose sums converge to the law of an additive triplet.
///
/// Level `n` has `n` symmetric Gaussian factors built from the eigenvectors
/// of `A`, `n` compound Poisson factors `(1 − r/n)δ_0 + (1/n)τ` with
/// `r = τ(ℝ^d)`, and shift `v − ∫ x/(1+‖x‖²) dτ`.
pub fn compound_planar(t: &AddLevyTriplet) -> Result<TriangularArray> {
    let d = t.dim();
    let mut axes: Vec<Vec<f64>> = Vec::new();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| t.a()[i][j]);
    let eig = m.symmetric_eigen();
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 0.0 {
            let scale = (d as f64 * lam).sqrt();
            axes.push(
                eig.eigenvectors
                    .column(i)
                    .iter()
                    .map(|x| x * scale)
                    .collect(),
            );
        }
    }
    let tau = t.tau().clone();
    let rate = tau.total_mass();
    let shift: Vec<f64> = (0..d)
        .map(|j| t.v()[j] - tau.integrate_real(|x| x[j] / (1.0 + dot(x, x))))
        .collect();
    let gen = move |n: u64| -> Result<PlanarRow> {
        let nf = n as f64;
        let len = usize_of(n)?;
        let mut measures = Vec::with_capacity(2 * len);
        let mut gauss = Vec::new();
        for axis in &axes {
            let w = 1.0 / (2.0 * d as f64);
            gauss.push((axis.iter().map(|x| x / nf.sqrt()).collect::<Vec<f64>>(), w));
            gauss.push((axis.iter().map(|x| -x / nf.sqrt()).collect::<Vec<f64>>(), w));
        }
        let used: f64 = gauss.iter().map(|(_, w)| w).sum();
        if used < 1.0 {
            gauss.push((vec![0.0; d], 1.0 - used));
        }
        let g = PlanarAtomicMeasure::new(d, MeasureMode::Probability, gauss)?;
        measures.extend(std::iter::repeat_n(g, len));
        if rate > 0.0 {
            if !(rate < nf) {
                return Err(Error::InvalidArray(format!(
                    "level n = {n} must exceed the jump rate {rate}"
                )));
            }
            let mut raw = vec![(vec![0.0; d], 1.0 - rate / nf)];
            raw.extend(tau.atoms().iter().map(|a| (a.x.clone(), a.w / nf)));
            let p = PlanarAtomicMeasure::new(d, MeasureMode::Probability, raw)?;
            measures.extend(std::iter::repeat_n(p, len));
        } else {
            let id =
                PlanarAtomicMeasure::new(d, MeasureMode::Probability, vec![(vec![0.0; d], 1.0)])?;
            measures.extend(std::iter::repeat_n(id, len));
        }
        Ok(PlanarRow {
            shift: shift.clone(),
            measures,
        })
    };
    Ok(TriangularArray::planar(d, Arc::new(gen)))
}

/// Rows of `n` copies of `δ_1`.
pub fn constant_array(dim: usize) -> TriangularArray {
    let gen = move |n: u64| -> Result<TorusRow> {
        let id = AtomicTorusMeasure::dirac(&vec![0.0; dim])?;
        Ok(TorusRow {
            shift: vec![0.0; dim],
            measures: vec![id; usize_of(n)?],
        })
    };
    TriangularArray::torus(dim, Arc::new(gen))
}

/// Wraps every row and shift of a planar array onto the torus.
pub fn wrap_array(array: &TriangularArray) -> Result<TriangularArray> {
    let ArraySource::Planar(g) = array.source() else {
        return Err(Error::Precondition(
            "wrap_array requires a planar array".into(),
        ));
    };
    let g = g.clone();
    let gen = move |n: u64| -> Result<TorusRow> {
        let row = g(n)?;
        let measures = row
            .measures
            .iter()
            .map(|m| wrap_pushforward(m, false))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusRow {
            shift: row.shift.iter().copied().map(canonicalize).collect(),
            measures,
        })
    };
    TriangularArray::torus(array.dim(), Arc::new(gen)).with_theta(array.theta())
}

/// Applies the coordinate flip to every row and shift.
pub fn flip_array(array: &TriangularArray) -> Result<TriangularArray> {
    if array.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: array.dim(),
        });
    }
    let theta = array.theta();
    match array.source().clone() {
        ArraySource::Torus(g) => {
            let gen = move |n: u64| -> Result<TorusRow> {
                let row = g(n)?;
                let measures = row
                    .measures
                    .iter()
                    .map(|m| m.flip())
                    .collect::<Result<Vec<_>>>()?;
                Ok(TorusRow {
                    shift: vec![row.shift[0], canonicalize(-row.shift[1])],
                    measures,
                })
            };
            TriangularArray::torus(2, Arc::new(gen)).with_theta(theta)
        }
        ArraySource::Planar(g) => {
            let gen = move |n: u64| -> Result<PlanarRow> {
                let row = g(n)?;
                let measures = row
                    .measures
                    .iter()
                    .map(|m| {
                        let raw = m
                            .atoms()
                            .iter()
                            .map(|a| (vec![a.x[0], -a.x[1]], a.w))
                            .collect();
                        PlanarAtomicMeasure::new(2, m.mode(), raw)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PlanarRow {
                    shift: vec![row.shift[0], -row.shift[1]],
                    measures,
                })
            };
            TriangularArray::planar(2, Arc::new(gen)).with_theta(theta)
        }
    }
}

pub type PerturbationFn = Arc<dyn Fn(u64, usize) -> Vec<f64> + Send + Sync>;

/// Replaces row entry `ν_{nk}` by `ν_{nk}(e^{iθ_{nk}} ·)`.
pub fn perturb_array(
    array: &TriangularArray,
    theta_gen: PerturbationFn,
) -> Result<TriangularArray> {
    let ArraySource::Torus(g) = array.source().clone() else {
        return Err(Error::Precondition(
            "perturb_array requires a torus array".into(),
        ));
    };
    let dim = array.dim();
    let gen = move |n: u64| -> Result<TorusRow> {
        let row = g(n)?;
        let measures = row
            .measures
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let th = theta_gen(n, k);
                check_dim(dim, th.len())?;
                let neg: Vec<f64> = th.iter().map(|x| -x).collect();
                m.rotate(&neg)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusRow {
            shift: row.shift,
            measures,
        })
    };
    TriangularArray::torus(dim, Arc::new(gen)).with_theta(array.theta())
}

/// `Σ_k (1 − cos θ_{nkj})` for each coordinate `j`.
pub fn perturbation_budget(
    array: &TriangularArray,
    theta_gen: &PerturbationFn,
    n: u64,
) -> Result<Vec<f64>> {
    let k_n = array.k(n)?;
    let mut out = vec![0.0; array.dim()];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = crate::numeric::sum((0..k_n).map(|k| {
            let h = (0.5 * theta_gen(n, k)[j]).sin();
            2.0 * h * h
        }));
    }
    Ok(out)
}

/// Whether rows of an identically distributed array are recentred by their
/// mean directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IidMode {
    Plain,
    Rotated,
}

pub type MeasureGenerator = Arc<dyn Fn(u64) -> Result<AtomicTorusMeasure> + Send + Sync>;
pub type RowLength = Arc<dyn Fn(u64) -> usize + Send + Sync>;

/// Array of `k_n` copies of `ν_n`, or of `ν̃_n = ν_n(ω_n ·)` in rotated mode.
#[derive(Clone)]
pub struct IidArray {
    dim: usize,
    nu: MeasureGenerator,
    k_gen: RowLength,
    mode: IidMode,
}

impl IidArray {
    pub fn new(dim: usize, nu: MeasureGenerator, k_gen: RowLength, mode: IidMode) -> Self {
        IidArray {
            dim,
            nu,
            k_gen,
            mode,
        }
    }

    pub fn constant(nu: AtomicTorusMeasure, k_gen: RowLength, mode: IidMode) -> Self {
        Self::new(nu.dim(), Arc::new(move |_| Ok(nu.clone())), k_gen, mode)
    }

    /// Mean directions `ω_{nj} = m_{e_j}(ν_n)/|m_{e_j}(ν_n)|` as angles.
    pub fn omega(&self, n: u64) -> Result<Vec<f64>> {
        let nu = (self.nu)(n)?;
        check_dim(self.dim, nu.dim())?;
        let d = self.dim;
        (0..d)
            .map(|j| {
                let mut e = vec![0i64; d];
                e[j] = 1;
                let m = nu.moment(&e)?;
                if m.norm() <= 1e-12 {
                    Err(Error::ZeroMean)
                } else {
                    Ok(m.arg())
                }
            })
            .collect()
    }

    /// `ω_n^{k_n}` as angles.
    pub fn omega_power(&self, n: u64) -> Result<Vec<f64>> {
        let k = (self.k_gen)(n) as f64;
        Ok(self
            .omega(n)?
            .into_iter()
            .map(|w| canonicalize(k * w))
            .collect())
    }

    /// The row measure at level `n`: `ν_n` or `ν̃_n`.
    pub fn row_measure(&self, n: u64) -> Result<AtomicTorusMeasure> {
        let nu = (self.nu)(n)?;
        match self.mode {
            IidMode::Plain => Ok(nu),
            IidMode::Rotated => {
                let neg: Vec<f64> = self.omega(n)?.iter().map(|x| -x).collect();
                nu.rotate(&neg)
            }
        }
    }

    /// `ρ_n = k_n ν̃_n` (or `k_n ν_n` in plain mode).
    pub fn rho_n(&self, n: u64) -> Result<AtomicTorusMeasure> {
        self.row_measure(n)?
            .scale((self.k_gen)(n) as f64, MeasureMode::Finite)
    }

    /// As a triangular array; in rotated mode the shift is `ω_n^{k_n}` so the
    /// row products are unchanged.
    pub fn array(&self) -> Result<TriangularArray> {
        let dim = self.dim;
        let this = self.clone();
        let gen = move |n: u64| -> Result<TorusRow> {
            let m = this.row_measure(n)?;
            let shift = match this.mode {
                IidMode::Plain => vec![0.0; dim],
                IidMode::Rotated => this.omega_power(n)?,
            };
            Ok(TorusRow {
                shift,
                measures: vec![m; (this.k_gen)(n)],
            })
        };
        Ok(TriangularArray::torus(dim, Arc::new(gen)))
    }
}
