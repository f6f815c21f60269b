//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bitorus::idempotents::{classify_idempotent, has_p_factor, in_p_times_report, IdempotentKind};
use bitorus::levy::{
    diagram_check, kernel_im_sup, kernel_integral, AddLevyTriplet, LevyMeasureT, MulLevyTriplet,
};
use bitorus::limits::{center_row, gaussian, poisson};
use bitorus::measures::{
    bifree_convolve_special, circ_convolve, AtomicTorusMeasure, MeasureMode, MomentMeasure,
    PlanarAtomicMeasure,
};
use bitorus::series::{free_mul_convolve, moments_from_sigma, sigma_from_moments, u_series};
use bitorus::uniqueness::{
    alt_compensator_demo, det_identity_check, l_unique_decide, strict_unique_check, triplet_equiv,
    AtomPair, Equivalence, UniquenessVerdict,
};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disc_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = 0.95 * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

fn random_atomic(
    rng: &mut ChaCha8Rng,
    dim: usize,
    atoms: usize,
    mode: MeasureMode,
) -> AtomicTorusMeasure {
    let mut w: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
    if mode == MeasureMode::Probability {
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
    }
    let raw = w
        .into_iter()
        .map(|wi| ((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect(), wi))
        .collect();
    AtomicTorusMeasure::new(dim, mode, raw).expect("valid random measure")
}

/// `r^{|p|} e^{i p arg z}`: `z^p` for `p ≥ 0` and `z̄^{|p|}` otherwise, from
/// polar form rather than binary powering.
fn polar_power(z: Complex64, p: i64) -> Complex64 {
    let (r, a) = z.to_polar();
    Complex64::from_polar(r.powi(p.unsigned_abs() as i32), a * p as f64)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn kappa_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n_atoms = rng.gen_range(1..=6);
        let nu = random_atomic(&mut rng, 2, n_atoms, MeasureMode::Probability);
        let (kc, kd) = (disc_point(&mut rng), disc_point(&mut rng));
        let kk = MomentMeasure::kappa_product(kc, kd).map_err(|e| e.to_string())?;
        let m = MomentMeasure::atomic(nu.clone()).map_err(|e| e.to_string())?;
        let conv = circ_convolve(&m, &kk).map_err(|e| e.to_string())?;
        let bifree = bifree_convolve_special(&m, &kk).map_err(|e| e.to_string())?;
        for p in -5..=5 {
            for q in -5..=5 {
                let direct: Complex64 = nu
                    .atoms()
                    .iter()
                    .map(|a| {
                        Complex64::from_polar(
                            a.w,
                            p as f64 * a.theta[0].value() + q as f64 * a.theta[1].value(),
                        )
                    })
                    .sum();
                let expect = direct * polar_power(kc, p) * polar_power(kd, q);
                let got = conv.moment(&[p, q]).map_err(|e| e.to_string())?;
                let got_b = bifree.moment(&[p, q]).map_err(|e| e.to_string())?;
                worst = worst
                    .max((got - expect).norm())
                    .max((got_b - expect).norm());
            }
        }
    }
    check(worst < 1e-12, format!("max error {worst:.3e}"))
}

fn kernel_integral_check() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut sup_ok = true;
    for p in 1..=10 {
        let v = kernel_integral(p, 4096);
        worst = worst.max((v - c(-2.0 * p as f64 * PI, 0.0)).norm());
        sup_ok &= kernel_im_sup(p, 4096) <= (p * p * p) as f64;
    }
    check(
        worst < 1e-8 && sup_ok,
        format!("max quadrature error {worst:.3e}, Im bound holds: {sup_ok}"),
    )
}

fn pi_triplet(gamma: f64, phi: f64, w: f64) -> MulLevyTriplet {
    let m = AtomicTorusMeasure::new(1, MeasureMode::Levy, vec![(vec![phi], w)]).expect("valid");
    MulLevyTriplet::new(&[gamma], vec![vec![0.0]], LevyMeasureT::Atomic(m)).expect("valid")
}

fn pair_triplet(p: &AtomPair) -> Result<MulLevyTriplet, String> {
    let m = p.measure().map_err(|e| e.to_string())?;
    MulLevyTriplet::new(&[0.0], vec![vec![0.0]], LevyMeasureT::Atomic(m)).map_err(|e| e.to_string())
}

fn non_uniqueness_witness() -> Outcome {
    let (a, b) = (
        pi_triplet(0.0, PI / 2.0, PI),
        pi_triplet(0.0, -PI / 2.0, PI),
    );
    let mut worst: f64 = 0.0;
    for n in -50..=50 {
        worst = worst.max((a.char(&[n]).unwrap() - b.char(&[n]).unwrap()).norm());
    }
    let eq = triplet_equiv(&a, &b, 50, 1e-9)
        .map_err(|e| e.to_string())?
        .verdict;
    let strict = strict_unique_check(
        a.rho().as_atomic().unwrap(),
        b.rho().as_atomic().unwrap(),
        50,
        1e-9,
    )
    .map_err(|e| e.to_string())?;
    check(
        worst < 1e-12 && eq == Equivalence::Equivalent && !strict,
        format!("char gap {worst:.3e}, equiv {eq:?}, strict {strict}"),
    )
}

fn exceptional_enumeration() -> Outcome {
    let pair = AtomPair::from_cos(BigRational::from_integer(0.into()), PI, 0.0)
        .map_err(|e| e.to_string())?;
    let members = match l_unique_decide(&pair).map_err(|e| e.to_string())? {
        UniquenessVerdict::Enumerated(l) => l,
        other => return Err(format!("expected an enumeration, got {other:?}")),
    };
    let expect = [(PI, 0.0), (PI / 2.0, PI / 2.0), (0.0, PI)];
    let shape = members.len() == 3
        && members.iter().zip(expect).all(|(m, (cw, dw))| {
            (m.c - cw).abs() < 1e-12 && (m.d - dw).abs() < 1e-12 && (m.phi - PI / 2.0).abs() < 1e-15
        });
    let mut pairwise = true;
    for a in &members {
        for b in &members {
            let r = triplet_equiv(&pair_triplet(a)?, &pair_triplet(b)?, 100, 1e-9)
                .map_err(|e| e.to_string())?;
            pairwise &= r.verdict == Equivalence::Equivalent;
        }
    }
    check(
        shape && pairwise,
        format!("{} members, pairwise equivalent: {pairwise}", members.len()),
    )
}

fn l_uniqueness_decisions() -> Outcome {
    let start = Instant::now();
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let one_third = l_unique_decide(&AtomPair::from_cos(q(1, 3), 1.0, 0.5).unwrap())
        .map_err(|e| e.to_string())?;
    let pi_third =
        l_unique_decide(&AtomPair::new(PI / 3.0, 1.0, 0.5).unwrap()).map_err(|e| e.to_string())?;
    let three_quarters = l_unique_decide(&AtomPair::from_cos(q(3, 4), 1.0, 0.5).unwrap())
        .map_err(|e| e.to_string())?;
    let pi = l_unique_decide(&AtomPair::from_cos(q(-1, 1), 1.0, 0.5).unwrap())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let ok = one_third == UniquenessVerdict::Unique
        && matches!(pi_third, UniquenessVerdict::Enumerated(_))
        && matches!(three_quarters, UniquenessVerdict::Unknown(_))
        && pi == UniquenessVerdict::Unique
        && within(elapsed, 0.1);
    check(
        ok,
        format!(
            "verdicts as expected, {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn torus_clt() -> Outcome {
    let start = Instant::now();
    let arr = gaussian([[1.0, 0.0], [0.0, 1.0]]).map_err(|e| e.to_string())?;
    let ps: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [2, -1]];
    let mut maxima = Vec::new();
    let mut closed_gap: f64 = 0.0;
    for n in [100u64, 1000, 10_000] {
        let row = center_row(&arr, n).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for p in ps {
            let target = (-0.5 * ((p[0] * p[0] + p[1] * p[1]) as f64)).exp();
            worst = worst.max((row.product_char(&p).map_err(|e| e.to_string())? - target).norm());
        }
        let closed = ((1.0 + (2f64.sqrt() / (n as f64).sqrt()).cos()) / 2.0).powi(n as i32);
        closed_gap = closed_gap.max((row.product_char(&[1, 0]).unwrap() - closed).norm());
        maxima.push(worst);
    }
    let elapsed = start.elapsed();
    let monotone = maxima.windows(2).all(|w| w[1] < w[0]);
    check(
        maxima[2] < 1e-3 && monotone && closed_gap < 1e-10 && within(elapsed, 5.0),
        format!(
            "errors {:.2e} {:.2e} {:.2e}, closed-form gap {closed_gap:.1e}, {:.2} s",
            maxima[0],
            maxima[1],
            maxima[2],
            elapsed.as_secs_f64()
        ),
    )
}

fn compound_poisson() -> Outcome {
    let start = Instant::now();
    let jump = PlanarAtomicMeasure::new(
        2,
        MeasureMode::Probability,
        vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)],
    )
    .map_err(|e| e.to_string())?;
    let arr = poisson(1.0, jump).map_err(|e| e.to_string())?;
    let row = center_row(&arr, 10_000).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for p1 in -3i64..=3 {
        for p2 in -3i64..=3 {
            let mu = (c(0.0, p1 as f64).exp() + c(0.0, p2 as f64).exp()) * 0.5;
            let target = (mu - 1.0).exp();
            worst = worst
                .max((row.product_char(&[p1, p2]).map_err(|e| e.to_string())? - target).norm());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst < 1e-3 && within(elapsed, 5.0),
        format!("max error {worst:.3e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn series_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut conv_err: f64 = 0.0;
    let mut trip_err: f64 = 0.0;
    for _ in 0..10 {
        let (c1, c2) = (disc_point(&mut rng), disc_point(&mut rng));
        let (c1, c2) = if c1.norm() < 0.05 {
            (c1 + 0.1, c2)
        } else {
            (c1, c2)
        };
        let (c1, c2) = if c2.norm() < 0.05 {
            (c1, c2 + 0.1)
        } else {
            (c1, c2)
        };
        let m1: Vec<Complex64> = (1..=6).map(|k| polar_power(c1, k)).collect();
        let m2: Vec<Complex64> = (1..=6).map(|k| polar_power(c2, k)).collect();
        let got = free_mul_convolve(&m1, &m2, 6).map_err(|e| e.to_string())?;
        for (k, g) in got.iter().enumerate() {
            conv_err = conv_err.max((g - polar_power(c1 * c2, k as i64 + 1)).norm());
        }
        let nu = AtomicTorusMeasure::new(
            1,
            MeasureMode::Probability,
            (0..4)
                .map(|_| (vec![rng.gen_range(-1.0..1.0)], 0.25))
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        let m: Vec<Complex64> = (1..=12).map(|k| nu.moment(&[k]).unwrap()).collect();
        let back = moments_from_sigma(&sigma_from_moments(&m).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for (a, b) in m.iter().zip(&back) {
            trip_err = trip_err.max((a - b).norm());
        }
    }
    check(
        conv_err < 1e-10 && trip_err < 1e-12,
        format!("convolution {conv_err:.3e}, round trip {trip_err:.3e}"),
    )
}

fn random_mul_triplet(rng: &mut ChaCha8Rng) -> MulLevyTriplet {
    let (a11, a22) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
    let a12 = rng.gen_range(-1.0..1.0) * f64::sqrt(a11 * a22);
    let n_atoms = rng.gen_range(1..=5);
    let rho = random_atomic(rng, 2, n_atoms, MeasureMode::Levy);
    let gamma = [rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)];
    MulLevyTriplet::new(
        &gamma,
        vec![vec![a11, a12], vec![a12, a22]],
        LevyMeasureT::Atomic(rho),
    )
    .expect("valid")
}

fn generating_series() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t = random_mul_triplet(&mut rng);
        let s = u_series(&t, 8).map_err(|e| e.to_string())?;
        for p1 in 0..=8usize {
            for p2 in 0..=8usize {
                let p = [p1 as i64, p2 as i64];
                let g: Vec<f64> = t.gamma_arg().iter().map(|a| a.value()).collect();
                let a = t.a();
                let (x, y) = (p1 as f64, p2 as f64);
                let gauss = -0.5 * (a[0][0] * x * x + 2.0 * a[0][1] * x * y + a[1][1] * y * y);
                let levy: Complex64 = t
                    .rho()
                    .as_atomic()
                    .unwrap()
                    .atoms()
                    .iter()
                    .map(|at| {
                        let (t1, t2) = (at.theta[0].value(), at.theta[1].value());
                        let ph = x * t1 + y * t2;
                        c(ph.cos() - 1.0, ph.sin() - (x * t1.sin() + y * t2.sin())) * at.w
                    })
                    .sum();
                let expect = c(gauss, x * g[0] + y * g[1]) + levy;
                worst = worst.max((s.divided.coeff(p1, p2) - expect).norm());
                worst = worst.max((t.exponent(&p).unwrap() - expect).norm());
            }
        }
    }
    check(worst < 1e-10, format!("max coefficient error {worst:.3e}"))
}

fn diagram_commutativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let atoms = (0..5)
            .map(|_| {
                (
                    vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    rng.gen_range(0.05..1.0),
                )
            })
            .collect();
        let tau =
            PlanarAtomicMeasure::new(2, MeasureMode::Levy, atoms).map_err(|e| e.to_string())?;
        let (a11, a22) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let a12 = rng.gen_range(-1.0..1.0) * f64::sqrt(a11 * a22);
        let v = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let t = AddLevyTriplet::new(v, vec![vec![a11, a12], vec![a12, a22]], tau)
            .map_err(|e| e.to_string())?;
        worst = worst.max(
            diagram_check(&t, 20)
                .map_err(|e| e.to_string())?
                .max_discrepancy,
        );
    }
    check(worst < 1e-10, format!("max discrepancy {worst:.3e}"))
}

fn idempotent_suite() -> Outcome {
    let mut ok = true;
    for kind in IdempotentKind::ALL {
        let m = kind.measure().expect("canonical measure");
        ok &= classify_idempotent(&m, 10).map_err(|e| e.to_string())? == kind;
    }
    for cc in [c(0.3, 0.0), c(0.0, 0.8), c(1.0, 0.0)] {
        let m = MomentMeasure::p_kappa(cc).map_err(|e| e.to_string())?;
        let (found, got) = has_p_factor(&m, 10).map_err(|e| e.to_string())?;
        ok &= found && (got - cc).norm() < 1e-12;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let kk = MomentMeasure::kappa_product(disc_point(&mut rng), disc_point(&mut rng))
            .map_err(|e| e.to_string())?;
        let r = in_p_times_report(&kk, true).map_err(|e| e.to_string())?;
        ok &= r.in_p_times && r.m11_nonzero == Some(true);
    }
    check(
        ok,
        "kinds, P factors and nonzero-mean membership as expected".into(),
    )
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let den: i64 = rng.gen_range(1..=40);
    let num: i64 = rng.gen_range(-40..=40);
    BigRational::new(num.into(), den.into())
}

fn determinant_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut count = 0;
    for m in 2..=4 {
        let mut done = 0;
        while done < 20 {
            let xs: Vec<BigRational> = (0..m).map(|_| random_rational(&mut rng)).collect();
            let one = BigRational::from_integer(1.into());
            if xs.contains(&one) || (0..m).any(|i| xs[..i].contains(&xs[i])) {
                continue;
            }
            if !det_identity_check(&xs).map_err(|e| e.to_string())? {
                return Err(format!("identity fails for {xs:?}"));
            }
            done += 1;
            count += 1;
        }
    }
    Ok(format!("{count} tuples, exact"))
}

fn alternative_compensator() -> Outcome {
    let r = alt_compensator_demo().map_err(|e| e.to_string())?;
    check(
        r.max_discrepancy < 1e-9,
        format!(
            "max discrepancy {:.3e} at n = {}",
            r.max_discrepancy, r.worst_n
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("kappa identity", kappa_identity),
        ("kernel integral", kernel_integral_check),
        ("non-uniqueness witness", non_uniqueness_witness),
        ("exceptional enumeration", exceptional_enumeration),
        ("L-uniqueness decisions", l_uniqueness_decisions),
        ("torus CLT", torus_clt),
        ("compound Poisson", compound_poisson),
        ("series oracle", series_oracle),
        ("generating-series identity", generating_series),
        ("diagram commutativity", diagram_commutativity),
        ("idempotent suite", idempotent_suite),
        ("determinant identities", determinant_identities),
        ("alternative compensator", alternative_compensator),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.3} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.3} s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
