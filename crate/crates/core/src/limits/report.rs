use num_complex::Complex64;

use super::array::TriangularArray;
use super::center::{additive_center_row, angle_gap, angle_norm, center_row, CenteredRow};
use crate::error::{Error, Result};
use crate::levy::MulLevyTriplet;
use crate::measures::{values, Angle, AtomicTorusMeasure, MeasureMode, PlanarAtomicMeasure};
use crate::numeric::{dot, integer_box};

/// Default ε grid for tail and truncated second-moment diagnostics.
pub const DEFAULT_EPS: [f64; 4] = [0.05, 0.1, 0.2, 0.5];

/// Moves `eps` off every radius in `radii` so no mass sits on the boundary.
pub fn nudge_eps(eps: f64, radii: &[f64]) -> f64 {
    let mut e = eps;
    for _ in 0..64 {
        let gap = 1e-9 * e.max(1.0);
        if radii.iter().all(|r| (r - e).abs() > gap) {
            return e;
        }
        e *= 1.0 + 1e-7;
    }
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsEntry {
    /// Requested ε.
    pub eps: f64,
    /// ε actually used after nudging.
    pub used: f64,
    /// `ρ_n(𝕋^d ∖ 𝒰_ε)`.
    pub tail: f64,
    /// `λ_{nj}(𝒰_ε)` for each `j`.
    pub lambda_inside: Vec<f64>,
    /// `max_k ν_{nk}(𝕋^d ∖ 𝒰_ε)`.
    pub infinitesimality: f64,
    /// `∫_{𝒰_ε} ⟨p, Im s⟩² dρ_n` for each requested `p`.
    pub q: Vec<(Vec<i64>, f64)>,
}

/// Finite-`n` diagnostics for a torus array.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusConditionReport {
    pub n: u64,
    /// `λ_{nj} = (1 − Re s_j) ρ_n`.
    pub lambda: Vec<AtomicTorusMeasure>,
    /// `∫ (Im s_j)(Im s_ℓ) dρ_n`.
    pub l: Vec<Vec<f64>>,
    pub eps: Vec<EpsEntry>,
    pub gamma_n: Vec<Angle>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEpsEntry {
    pub eps: f64,
    pub used: f64,
    /// `τ_n(ℝ^d ∖ 𝒱_ε)`.
    pub tail: f64,
    /// `σ_{nj}(𝒱_ε)`.
    pub sigma_inside: Vec<f64>,
    pub infinitesimality: f64,
    /// `∫_{𝒱_ε} ⟨u, x⟩² dτ_n`.
    pub q: Vec<(Vec<i64>, f64)>,
}

/// Finite-`n` diagnostics for a planar array.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarConditionReport {
    pub n: u64,
    /// `σ_{nj} = x_j²/(1 + x_j²) τ_n`.
    pub sigma: Vec<PlanarAtomicMeasure>,
    /// `∫ x_j x_ℓ / ((1 + x_j²)(1 + x_ℓ²)) dτ_n`.
    pub l: Vec<Vec<f64>>,
    pub eps: Vec<PlanarEpsEntry>,
    pub drift: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionReport {
    Torus(TorusConditionReport),
    Planar(PlanarConditionReport),
}

impl ConditionReport {
    pub fn as_torus(&self) -> Option<&TorusConditionReport> {
        match self {
            ConditionReport::Torus(r) => Some(r),
            ConditionReport::Planar(_) => None,
        }
    }

    pub fn as_planar(&self) -> Option<&PlanarConditionReport> {
        match self {
            ConditionReport::Planar(r) => Some(r),
            ConditionReport::Torus(_) => None,
        }
    }
}

fn torus_radii(m: &AtomicTorusMeasure) -> Vec<f64> {
    m.atoms()
        .iter()
        .map(|a| angle_norm(&values(&a.theta)))
        .collect()
}

/// Diagnostics at level `n` for the given ε values and frequencies.
pub fn condition_report(
    array: &TriangularArray,
    n: u64,
    eps_list: &[f64],
    p_list: &[Vec<i64>],
) -> Result<ConditionReport> {
    for p in p_list {
        crate::error::check_dim(array.dim(), p.len())?;
    }
    if array.is_torus() {
        let row = center_row(array, n)?;
        let raw = array.torus_row(n)?;
        Ok(ConditionReport::Torus(torus_report(
            &row,
            &raw.measures,
            eps_list,
            p_list,
        )?))
    } else {
        Ok(ConditionReport::Planar(planar_report(
            array, n, eps_list, p_list,
        )?))
    }
}

pub(crate) fn torus_report(
    row: &CenteredRow,
    raw: &[AtomicTorusMeasure],
    eps_list: &[f64],
    p_list: &[Vec<i64>],
) -> Result<TorusConditionReport> {
    let rho = &row.rho_n;
    let d = rho.dim();
    let lambda = (0..d)
        .map(|j| {
            let weighted = rho
                .atoms()
                .iter()
                .map(|a| {
                    let h = (0.5 * a.theta[j].value()).sin();
                    (values(&a.theta), 2.0 * h * h * a.w)
                })
                .collect();
            AtomicTorusMeasure::new(d, MeasureMode::Finite, weighted)
        })
        .collect::<Result<Vec<_>>>()?;
    let l = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| rho.integrate_real(|t| t[j].sin() * t[k].sin()))
                .collect()
        })
        .collect();
    let mut radii = torus_radii(rho);
    for m in raw {
        radii.extend(torus_radii(m));
    }
    let eps = eps_list
        .iter()
        .map(|&eps| {
            let used = nudge_eps(eps, &radii);
            let inside = |t: &[f64]| angle_norm(t) < used;
            EpsEntry {
                eps,
                used,
                tail: rho.integrate_real(|t| if inside(t) { 0.0 } else { 1.0 }),
                lambda_inside: lambda
                    .iter()
                    .map(|m| m.integrate_real(|t| if inside(t) { 1.0 } else { 0.0 }))
                    .collect(),
                infinitesimality: raw
                    .iter()
                    .map(|m| m.integrate_real(|t| if inside(t) { 0.0 } else { 1.0 }))
                    .fold(0.0, f64::max),
                q: p_list
                    .iter()
                    .map(|p| {
                        let v = rho.integrate_real(|t| {
                            if inside(t) {
                                let s: f64 =
                                    p.iter().zip(t).map(|(&pj, x)| pj as f64 * x.sin()).sum();
                                s * s
                            } else {
                                0.0
                            }
                        });
                        (p.clone(), v)
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(TorusConditionReport {
        n: row.n,
        lambda,
        l,
        eps,
        gamma_n: row.gamma_n.clone(),
    })
}

fn planar_report(
    array: &TriangularArray,
    n: u64,
    eps_list: &[f64],
    p_list: &[Vec<i64>],
) -> Result<PlanarConditionReport> {
    let row = additive_center_row(array, n)?;
    let raw = array.planar_row(n)?;
    let tau = &row.tau_n;
    let d = tau.dim();
    let sigma = (0..d)
        .map(|j| {
            let weighted = tau
                .atoms()
                .iter()
                .map(|a| (a.x.clone(), a.x[j] * a.x[j] / (1.0 + a.x[j] * a.x[j]) * a.w))
                .collect();
            PlanarAtomicMeasure::new(d, MeasureMode::Finite, weighted)
        })
        .collect::<Result<Vec<_>>>()?;
    let l = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| {
                    tau.integrate_real(|x| {
                        x[j] * x[k] / ((1.0 + x[j] * x[j]) * (1.0 + x[k] * x[k]))
                    })
                })
                .collect()
        })
        .collect();
    let norm = |x: &[f64]| dot(x, x).sqrt();
    let mut radii: Vec<f64> = tau.atoms().iter().map(|a| norm(&a.x)).collect();
    for m in &raw.measures {
        radii.extend(m.atoms().iter().map(|a| norm(&a.x)));
    }
    let eps = eps_list
        .iter()
        .map(|&eps| {
            let used = nudge_eps(eps, &radii);
            let inside = |x: &[f64]| norm(x) < used;
            PlanarEpsEntry {
                eps,
                used,
                tail: tau.integrate_real(|x| if inside(x) { 0.0 } else { 1.0 }),
                sigma_inside: sigma
                    .iter()
                    .map(|m| m.integrate_real(|x| if inside(x) { 1.0 } else { 0.0 }))
                    .collect(),
                infinitesimality: raw
                    .measures
                    .iter()
                    .map(|m| m.integrate_real(|x| if inside(x) { 0.0 } else { 1.0 }))
                    .fold(0.0, f64::max),
                q: p_list
                    .iter()
                    .map(|p| {
                        let v = tau.integrate_real(|x| {
                            if inside(x) {
                                let s: f64 = p.iter().zip(x).map(|(&pj, xj)| pj as f64 * xj).sum();
                                s * s
                            } else {
                                0.0
                            }
                        });
                        (p.clone(), v)
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(PlanarConditionReport {
        n,
        sigma,
        l,
        eps,
        drift: row.drift,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPoint {
    pub n: u64,
    pub p: Vec<i64>,
    pub error: f64,
}

/// Advisory trend diagnostics at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendEntry {
    pub n: u64,
    /// Largest coordinate gap between `γ_n` and the target drift, mod `2π`.
    pub gamma_gap: f64,
    /// `max |L(n) − (A + ∫ Im s Im sᵀ dρ)|`, when the target measure is atomic.
    pub l_gap: Option<f64>,
    /// Largest tail mismatch over the default ε grid, when atomic.
    pub tail_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub points: Vec<LimitPoint>,
    /// Largest error at each level.
    pub max_error: Vec<(u64, f64)>,
    pub trend: Vec<TrendEntry>,
    pub tol: f64,
    pub passes: bool,
}

impl LimitReport {
    /// Whether the per-level maximum error decreases strictly along `n`.
    pub fn monotone(&self) -> bool {
        self.max_error.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

fn target_l(target: &MulLevyTriplet) -> Option<Vec<Vec<f64>>> {
    let rho = target.rho().as_atomic()?;
    let d = target.dim();
    Some(
        (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| target.a()[j][k] + rho.integrate_real(|t| t[j].sin() * t[k].sin()))
                    .collect()
            })
            .collect(),
    )
}

/// Compares `ν̂_n(p)` with the target characteristic function over
/// `‖p‖∞ ≤ pmax`. Passes when the error at the largest `n` is below `tol`.
pub fn limit_check(
    array: &TriangularArray,
    target: &MulLevyTriplet,
    n_list: &[u64],
    pmax: i64,
    tol: f64,
) -> Result<LimitReport> {
    crate::error::check_dim(array.dim(), target.dim())?;
    if !array.is_torus() {
        return Err(Error::Precondition(
            "limit_check requires a torus array".into(),
        ));
    }
    if n_list.is_empty() || pmax < 0 {
        return Err(Error::Precondition(
            "need at least one level and pmax >= 0".into(),
        ));
    }
    let ps = integer_box(array.dim(), pmax);
    let l_target = target_l(target);
    let mut points = Vec::new();
    let mut max_error = Vec::new();
    let mut trend = Vec::new();
    let mut largest = (0u64, f64::INFINITY);
    for &n in n_list {
        let row = center_row(array, n)?;
        let mut worst: f64 = 0.0;
        for p in &ps {
            let err = (row.product_char(p)? - target.char(p)?).norm();
            worst = worst.max(err);
            points.push(LimitPoint {
                n,
                p: p.clone(),
                error: err,
            });
        }
        max_error.push((n, worst));
        if n >= largest.0 {
            largest = (n, worst);
        }
        let report = torus_report(&row, &[], &DEFAULT_EPS, &[])?;
        let l_gap = l_target.as_ref().map(|lt| {
            lt.iter()
                .zip(&report.l)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        });
        let tail_gap = target.rho().as_atomic().map(|rho| {
            report
                .eps
                .iter()
                .map(|e| {
                    (e.tail
                        - rho.integrate_real(|t| if angle_norm(t) < e.used { 0.0 } else { 1.0 }))
                    .abs()
                })
                .fold(0.0, f64::max)
        });
        trend.push(TrendEntry {
            n,
            gamma_gap: angle_gap(&row.gamma_n, target.gamma_arg()),
            l_gap,
            tail_gap,
        });
    }
    Ok(LimitReport {
        points,
        max_error,
        trend,
        tol,
        passes: largest.1 < tol,
    })
}

/// Constant `C(θ, d) = 3 + 3/(1 − cos(θ/(4√d)))`.
pub fn re_im_constant(theta: f64, d: usize) -> f64 {
    3.0 + 3.0 / (1.0 - (theta / (4.0 * (d as f64).sqrt())).cos())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReImReport {
    pub n: u64,
    pub c: f64,
    /// Smallest `rhs − lhs` over all row entries and frequencies.
    pub min_slack: f64,
    pub holds: bool,
}

/// Checks `|Im z_{nk}(p)| ≤ |Re z_{nk}(p)| + C ‖p‖ Σ_j |Re z_{nk}(e_j)|`.
pub fn re_im_bound_check(
    array: &TriangularArray,
    n: u64,
    p_list: &[Vec<i64>],
) -> Result<ReImReport> {
    let row = center_row(array, n)?;
    let d = array.dim();
    let c = re_im_constant(array.theta(), d);
    let basis: Vec<Vec<i64>> = (0..d)
        .map(|j| {
            let mut e = vec![0; d];
            e[j] = 1;
            e
        })
        .collect();
    let mut min_slack = f64::INFINITY;
    for k in 0..row.centered.len() {
        let base: f64 = basis.iter().map(|e| row.z(k, e).re.abs()).sum();
        for p in p_list {
            crate::error::check_dim(d, p.len())?;
            let z: Complex64 = row.z(k, p);
            let pn = p.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            let slack = z.re.abs() + c * pn * base - z.im.abs();
            min_slack = min_slack.min(slack);
        }
    }
    Ok(ReImReport {
        n,
        c,
        min_slack,
        holds: min_slack >= -1e-15,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyMeasureT;
    use crate::limits::{constant_array, gaussian, poisson, wrap_array};
    use crate::measures::{wrap_pushforward, PlanarAtomicMeasure};

    fn jump() -> PlanarAtomicMeasure {
        PlanarAtomicMeasure::new(
            2,
            MeasureMode::Probability,
            vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn gaussian_row_second_moment() {
        let arr = gaussian([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let row = center_row(&arr, 100).unwrap();
        assert!(row.b_arg.iter().all(|b| b.iter().all(|x| x.abs() < 1e-15)));
        let l11 = row.rho_n.integrate_real(|t| t[0].sin().powi(2));
        let expected = 100.0 * 0.5 * (2f64.sqrt() / 10.0).sin().powi(2);
        assert!((l11 - expected).abs() < 1e-12);
        assert!((expected - 0.9933).abs() < 1e-4);
    }

    #[test]
    fn gaussian_limit_passes() {
        let arr = gaussian([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let target = MulLevyTriplet::new(
            &[0.0, 0.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            LevyMeasureT::zero(2),
        )
        .unwrap();
        let rep = limit_check(&arr, &target, &[100, 1000, 10_000], 3, 1e-2).unwrap();
        assert!(rep.passes);
        assert!(rep.monotone());
    }

    #[test]
    fn poisson_limit_passes() {
        let arr = poisson(1.0, jump()).unwrap();
        let u = 0.5 * 1f64.sin();
        let rho = wrap_pushforward(&jump(), false).unwrap();
        let target =
            MulLevyTriplet::new(&[u, u], vec![vec![0.0; 2]; 2], LevyMeasureT::Atomic(rho)).unwrap();
        let rep = limit_check(&arr, &target, &[1000, 10_000], 3, 1e-2).unwrap();
        assert!(rep.passes, "{:?}", rep.max_error);
    }

    #[test]
    fn constant_array_is_exact() {
        let rep = limit_check(
            &constant_array(2),
            &MulLevyTriplet::trivial(2),
            &[1, 10],
            2,
            1e-300,
        )
        .unwrap();
        assert!(rep.points.iter().all(|p| p.error == 0.0));
    }

    #[test]
    fn condition_report_gaussian_trend() {
        let arr = gaussian([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let e1 = vec![1, 0];
        let rep = condition_report(&arr, 10_000, &DEFAULT_EPS, &[e1]).unwrap();
        let t = rep.as_torus().unwrap();
        assert!(t.l[0][1].abs() < 1e-12);
        for e in &t.eps {
            assert!((e.q[0].1 - 1.0).abs() < 1e-3);
            assert!(e.tail.abs() < 1e-15);
            assert!((e.q[0].1 - 2.0 * e.lambda_inside[0]).abs() < 1e-3);
        }
    }

    #[test]
    fn planar_report_and_wrap() {
        let arr = crate::limits::gaussian_planar([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let rep = condition_report(&arr, 400, &DEFAULT_EPS, &[vec![1, 0]]).unwrap();
        let p = rep.as_planar().unwrap();
        assert_eq!(p.sigma.len(), 2);
        assert!((p.eps[1].q[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(p.eps[0].q[0].1, 0.0);
        assert!(wrap_array(&arr).unwrap().is_torus());
    }

    #[test]
    fn re_im_bound_holds() {
        let arr = gaussian([[1.0, 0.5], [0.5, 1.0]]).unwrap();
        let ps = integer_box(2, 3);
        assert!(re_im_bound_check(&arr, 1000, &ps).unwrap().holds);
        let arr = poisson(1.0, jump()).unwrap();
        assert!(re_im_bound_check(&arr, 1000, &ps).unwrap().holds);
    }

    #[test]
    fn nudge_moves_off_radii() {
        assert_eq!(nudge_eps(0.1, &[0.2]), 0.1);
        assert_ne!(nudge_eps(0.1, &[0.1]), 0.1);
    }
}
