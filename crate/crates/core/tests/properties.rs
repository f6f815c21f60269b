use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use bitorus::idempotents::has_p_factor;
use bitorus::json::{measure_to_string, parse_measure, parse_triplet, triplet_to_string};
use bitorus::levy::{
    kernel_im_sup, triplet_convolve, wrap_triplet, AddLevyTriplet, LevyMeasureT, MulLevyTriplet,
};
use bitorus::limits::{center_row, flip_array, gaussian, TorusRow, TriangularArray};
use bitorus::measures::{
    bifree_convolve_special, circ_convolve, flip_star, rotate, wrap_pushforward,
    AtomicTorusMeasure, MeasureMode, MomentMeasure, PlanarAtomicMeasure,
};
use bitorus::numeric::integer_box;
use bitorus::series::{free_mul_convolve, moments_from_sigma, sigma_from_moments, u_series};
use bitorus::uniqueness::{
    chebyshev_u, l_unique_decide, levy_class_enumerate, strict_unique_check, triplet_equiv,
    AtomPair, Equivalence, ExceptionalAngle, UniquenessVerdict,
};

fn normalized(raw: Vec<(Vec<f64>, f64)>) -> Vec<(Vec<f64>, f64)> {
    let s: f64 = raw.iter().map(|a| a.1).sum();
    raw.into_iter().map(|(t, w)| (t, w / s)).collect()
}

fn prob(dim: usize) -> impl Strategy<Value = AtomicTorusMeasure> {
    prop::collection::vec(
        (prop::collection::vec(-4.0..4.0f64, dim), 0.05..1.0f64),
        1..6,
    )
    .prop_map(move |raw| {
        AtomicTorusMeasure::new(dim, MeasureMode::Probability, normalized(raw)).unwrap()
    })
}

fn levy(dim: usize, max_atoms: usize) -> impl Strategy<Value = AtomicTorusMeasure> {
    prop::collection::vec(
        (prop::collection::vec(0.05..3.0f64, dim), 0.05..2.0f64),
        0..max_atoms,
    )
    .prop_map(move |raw| AtomicTorusMeasure::new(dim, MeasureMode::Levy, raw).unwrap())
}

fn disc() -> impl Strategy<Value = Complex64> {
    (0.0..0.99f64, -PI..PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn psd2() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (0.0..2.0f64, 0.0..2.0f64, -1.0..1.0f64).prop_map(|(a, b, r)| {
        let off = r * (a * b).sqrt();
        vec![vec![a, off], vec![off, b]]
    })
}

fn mul_triplet2() -> impl Strategy<Value = MulLevyTriplet> {
    (prop::collection::vec(-PI..PI, 2), psd2(), levy(2, 5))
        .prop_map(|(g, a, rho)| MulLevyTriplet::new(&g, a, LevyMeasureT::Atomic(rho)).unwrap())
}

fn mul_triplet1() -> impl Strategy<Value = MulLevyTriplet> {
    (-PI..PI, 0.0..2.0f64, levy(1, 4)).prop_map(|(g, a, rho)| {
        MulLevyTriplet::new(&[g], vec![vec![a]], LevyMeasureT::Atomic(rho)).unwrap()
    })
}

fn planar_levy() -> impl Strategy<Value = PlanarAtomicMeasure> {
    prop::collection::vec((prop::collection::vec(-3.0..3.0f64, 2), 0.05..1.0f64), 0..5)
        .prop_map(|raw| PlanarAtomicMeasure::new(2, MeasureMode::Levy, raw).unwrap())
}

fn add_triplet() -> impl Strategy<Value = AddLevyTriplet> {
    (
        prop::collection::vec(-2.0..2.0f64, 2),
        psd2(),
        planar_levy(),
    )
        .prop_map(|(v, a, tau)| AddLevyTriplet::new(v, a, tau).unwrap())
}

fn measure2() -> impl Strategy<Value = MomentMeasure> {
    let leaf = prop_oneof![
        prob(2).prop_map(|m| MomentMeasure::atomic(m).unwrap()),
        (disc(), disc()).prop_map(|(c, d)| MomentMeasure::kappa_product(c, d).unwrap()),
        Just(MomentMeasure::BiHaarP),
        Just(MomentMeasure::BiHaarPStar),
        disc().prop_map(|c| MomentMeasure::p_kappa(c).unwrap()),
        disc().prop_map(|c| MomentMeasure::product(
            MomentMeasure::Haar,
            MomentMeasure::kappa(c).unwrap()
        )),
        mul_triplet2().prop_map(MomentMeasure::levy_khintchine),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| circ_convolve(&a, &b).unwrap()),
            (inner.clone(), prop::collection::vec(-4.0..4.0f64, 2))
                .prop_map(|(m, b)| rotate(&m, &b).unwrap()),
            inner.prop_map(|m| flip_star(&m).unwrap()),
        ]
    })
}

fn moments(m: &MomentMeasure, pmax: i64) -> Vec<Complex64> {
    m.moment_table(pmax).into_iter().map(|(_, v)| v).collect()
}

/// Moments `m_1..m_k` of a circle measure supported in `[−½, ½]`, so that
/// `|m_1| ≥ cos ½`.
fn near_one(k: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-0.5..0.5f64, 0.1..1.0f64), 1..5).prop_map(move |raw| {
        let raw = raw.into_iter().map(|(t, w)| (vec![t], w)).collect();
        let m = AtomicTorusMeasure::new(1, MeasureMode::Probability, normalized(raw)).unwrap();
        (1..=k as i64).map(|j| m.moment(&[j]).unwrap()).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_are_bounded_and_hermitian(m in measure2()) {
        prop_assert_eq!(m.moment(&[0, 0]).unwrap(), Complex64::new(1.0, 0.0));
        for p in integer_box(2, 4) {
            let v = m.moment(&p).unwrap();
            let w = m.moment(&[-p[0], -p[1]]).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-12);
            prop_assert!((w - v.conj()).norm() <= 1e-14);
        }
    }

    #[test]
    fn circ_convolve_commutes_and_associates(a in measure2(), b in measure2(), c in measure2()) {
        let ab = circ_convolve(&a, &b).unwrap();
        prop_assert_eq!(moments(&ab, 3), moments(&circ_convolve(&b, &a).unwrap(), 3));
        let left = circ_convolve(&ab, &c).unwrap();
        let right = circ_convolve(&a, &circ_convolve(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(moments(&left, 3), moments(&right, 3));
    }

    #[test]
    fn dirac_at_identity_is_neutral(nu in prob(2)) {
        let m = MomentMeasure::atomic(nu).unwrap();
        let id = MomentMeasure::identity(2);
        for r in [
            circ_convolve(&m, &id).unwrap(),
            circ_convolve(&id, &m).unwrap(),
            bifree_convolve_special(&m, &id).unwrap(),
            bifree_convolve_special(&id, &m).unwrap(),
        ] {
            prop_assert_eq!(moments(&r, 3), moments(&m, 3));
        }
    }

    #[test]
    fn wrapping_matches_additive_char(raw in prop::collection::vec((prop::collection::vec(-6.0..6.0f64, 2), 0.05..1.0f64), 1..6)) {
        let mu = PlanarAtomicMeasure::new(2, MeasureMode::Probability, normalized(raw)).unwrap();
        let w = wrap_pushforward(&mu, false).unwrap();
        for p in integer_box(2, 3) {
            let u: Vec<f64> = p.iter().map(|&x| x as f64).collect();
            prop_assert!((w.moment(&p).unwrap() - mu.char(&u).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_round_trip_is_exact(m in measure2(), b in prop::collection::vec(-4.0..4.0f64, 2)) {
        let back: Vec<f64> = b.iter().map(|x| -x).collect();
        let r = rotate(&rotate(&m, &b).unwrap(), &back).unwrap();
        prop_assert_eq!(moments(&r, 3), moments(&m, 3));
    }

    #[test]
    fn sigma_round_trip(m in near_one(12)) {
        let back = moments_from_sigma(&sigma_from_moments(&m).unwrap()).unwrap();
        for (a, b) in m.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "err {:e}", (a - b).norm());
        }
    }

    #[test]
    fn free_mul_convolution_is_commutative_and_associative(a in near_one(8), b in near_one(8), c in near_one(8)) {
        let ab = free_mul_convolve(&a, &b, 8).unwrap();
        let ba = free_mul_convolve(&b, &a, 8).unwrap();
        let ab_c = free_mul_convolve(&ab, &c, 8).unwrap();
        let a_bc = free_mul_convolve(&a, &free_mul_convolve(&b, &c, 8).unwrap(), 8).unwrap();
        for k in 0..8 {
            prop_assert!((ab[k] - ba[k]).norm() < 1e-10);
            prop_assert!((ab_c[k] - a_bc[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn u_series_matches_exponent(t in mul_triplet2()) {
        let s = u_series(&t, 8).unwrap();
        for i in 0..=8usize {
            for j in 0..=8usize {
                let e = t.exponent(&[i as i64, j as i64]).unwrap();
                prop_assert!((s.divided.coeff(i, j) - e).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn levy_char_is_bounded_and_hermitian(t in mul_triplet2()) {
        prop_assert_eq!(t.char(&[0, 0]).unwrap(), Complex64::new(1.0, 0.0));
        for p in integer_box(2, 5) {
            prop_assert!(t.char(&p).unwrap().norm() <= 1.0 + 1e-12);
            let e = t.exponent(&p).unwrap();
            let f = t.exponent(&[-p[0], -p[1]]).unwrap();
            prop_assert!((f - e.conj()).norm() <= 1e-12 * e.norm().max(1.0));
        }
    }

    #[test]
    fn haar_density_paths_agree(g in -PI..PI, a in 0.0..1.0f64, scale in 0.0..3.0f64) {
        let t = MulLevyTriplet::new(&[g], vec![vec![a]], LevyMeasureT::HaarKernelDensity { scale }).unwrap();
        for p in -10..=10 {
            let q = t.exponent_quadrature(&[p], 4096).unwrap();
            prop_assert!((t.exponent(&[p]).unwrap() - q).norm() < 1e-8);
        }
    }

    #[test]
    fn wrapping_commutes_with_convolution(a in add_triplet(), b in add_triplet()) {
        let lhs = wrap_triplet(&a.add(&b).unwrap()).unwrap();
        let rhs = triplet_convolve(&wrap_triplet(&a).unwrap(), &wrap_triplet(&b).unwrap()).unwrap();
        for p in integer_box(2, 15) {
            prop_assert!((lhs.char(&p).unwrap() - rhs.char(&p).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn gamma_n_ignores_row_order(row in prop::collection::vec(prob(2), 1..6), shift in prop::collection::vec(-PI..PI, 2)) {
        let make = |measures: Vec<AtomicTorusMeasure>| {
            let shift = shift.clone();
            TriangularArray::torus(2, Arc::new(move |_| Ok(TorusRow { shift: shift.clone(), measures: measures.clone() })))
        };
        let mut rev = row.clone();
        rev.reverse();
        let (a, b) = (center_row(&make(row), 1).unwrap(), center_row(&make(rev), 1).unwrap());
        prop_assert_eq!(&a.gamma_n, &b.gamma_n);
        prop_assert_eq!(a.product_char(&[0, 0]).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn p_factor_is_fixed_by_p(c in disc()) {
        let m = MomentMeasure::p_kappa(c).unwrap();
        prop_assert!(has_p_factor(&m, 10).unwrap().0);
        let mp = circ_convolve(&m, &MomentMeasure::BiHaarP).unwrap();
        prop_assert_eq!(moments(&mp, 10), moments(&m, 10));
    }

    #[test]
    fn enumerations_are_consistent(c in 0.0..10.0f64, d in 0.0..10.0f64, which in 0usize..3) {
        let angle = ExceptionalAngle::ALL[which];
        let pair = AtomPair::new(angle.phi(), c, d).unwrap();
        let UniquenessVerdict::Enumerated(list) = l_unique_decide(&pair).unwrap() else {
            return Err(TestCaseError::fail("expected an enumeration"));
        };
        let k = angle.step();
        let expected_len = ((d / k + 1e-12).floor() + (c / k + 1e-12).floor()) as usize + 1;
        prop_assert_eq!(list.len(), expected_len);
        prop_assert!(list.iter().any(|m| m.c == c && m.d == d));
        prop_assert_eq!(levy_class_enumerate(angle, c, d).unwrap(), list.clone());
        let to_t = |p: &AtomPair| {
            MulLevyTriplet::new(&[0.0], vec![vec![0.0]], LevyMeasureT::Atomic(p.measure().unwrap())).unwrap()
        };
        for a in &list {
            prop_assert!((a.mass() - (c + d)).abs() < 1e-9);
            for b in &list {
                prop_assert_eq!(triplet_equiv(&to_t(a), &to_t(b), 100, 1e-9).unwrap().verdict, Equivalence::Equivalent);
            }
        }
    }

    #[test]
    fn chebyshev_bound(phi in 0.0..PI, n in 1usize..40) {
        prop_assert!(chebyshev_u(n - 1, &phi.cos()).abs() <= n as f64 * (1.0 + 1e-9));
    }

    #[test]
    fn equivalence_is_reflexive(t in mul_triplet1()) {
        prop_assert_eq!(triplet_equiv(&t, &t, 50, 1e-9).unwrap().verdict, Equivalence::Equivalent);
    }

    #[test]
    fn strict_implies_equivalent(a in levy(1, 4), b in levy(1, 4), same in any::<bool>()) {
        let b = if same { a.clone() } else { b };
        if strict_unique_check(&a, &b, 20, 1e-9).unwrap() {
            let t = |m: &AtomicTorusMeasure| {
                MulLevyTriplet::new(&[0.0], vec![vec![0.0]], LevyMeasureT::Atomic(m.clone())).unwrap()
            };
            prop_assert_eq!(triplet_equiv(&t(&a), &t(&b), 20, 1e-9).unwrap().verdict, Equivalence::Equivalent);
        }
    }

    #[test]
    fn json_round_trip(m in measure2(), t in mul_triplet2()) {
        let s = measure_to_string(&m);
        let back = parse_measure(&s).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(measure_to_string(&back), s);
        let ts = triplet_to_string(&t);
        prop_assert_eq!(parse_triplet(&ts).unwrap(), t);
    }
}

#[test]
fn kernel_imaginary_part_bound() {
    for p in 1..=10 {
        assert!(kernel_im_sup(p, 1024) <= (p * p * p) as f64);
    }
}

#[test]
fn infinitesimality_decreases() {
    let jump = PlanarAtomicMeasure::new(
        2,
        MeasureMode::Probability,
        vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)],
    )
    .unwrap();
    let arrays = [
        gaussian([[1.0, 0.0], [0.0, 1.0]]).unwrap(),
        bitorus::limits::poisson(1.0, jump).unwrap(),
    ];
    for arr in &arrays {
        let mut prev = vec![f64::INFINITY; 3];
        let mut last = Vec::new();
        for n in [10u64, 100, 1000, 10_000] {
            let rep = bitorus::limits::condition_report(arr, n, &[0.1, 0.5, 1.0], &[]).unwrap();
            let inf: Vec<f64> = rep
                .as_torus()
                .unwrap()
                .eps
                .iter()
                .map(|e| e.infinitesimality)
                .collect();
            for (a, b) in inf.iter().zip(&prev) {
                assert!(a <= b);
            }
            prev = inf.clone();
            last = inf;
        }
        assert!(last.iter().all(|&x| x <= 1e-4));
    }
}

#[test]
fn double_flip_restores_rows() {
    let arr = gaussian([[1.0, 0.5], [0.5, 1.0]]).unwrap();
    let back = flip_array(&flip_array(&arr).unwrap()).unwrap();
    let (a, b) = (arr.torus_row(50).unwrap(), back.torus_row(50).unwrap());
    for (x, y) in a.measures.iter().zip(&b.measures) {
        for p in integer_box(2, 3) {
            assert_eq!(x.moment(&p).unwrap(), y.moment(&p).unwrap());
        }
    }
}
