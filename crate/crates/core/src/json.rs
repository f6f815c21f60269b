//! JSON forms of measures and triplets.
//!
//! Measures are tagged by `kind`: `atomic`, `dirac`, `haar`, `biP`,
//! `biPstar`, `kappa`, `product`, `rotate`, `flip`, `conv`, `lk` and, for
//! measures on `ℝ^d`, `planar`. Complex numbers are `[re, im]` pairs and
//! angles are radians.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::levy::{AddLevyTriplet, LevyMeasureT, MulLevyTriplet};
use crate::measures::{
    circ_convolve, flip_star, rotate, values, AtomicTorusMeasure, MeasureMode, MomentMeasure,
    PlanarAtomicMeasure,
};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusAtomJson {
    pub theta: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarAtomJson {
    pub x: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", try_from = "RawMeasure")]
pub enum MeasureJson {
    #[serde(rename = "atomic")]
    Atomic {
        dim: usize,
        atoms: Vec<TorusAtomJson>,
    },
    #[serde(rename = "dirac")]
    Dirac { theta: Vec<f64> },
    #[serde(rename = "haar")]
    Haar,
    #[serde(rename = "biP")]
    BiP,
    #[serde(rename = "biPstar")]
    BiPstar,
    #[serde(rename = "kappa")]
    Kappa { c: [f64; 2] },
    #[serde(rename = "product")]
    Product { factors: Vec<MeasureJson> },
    #[serde(rename = "rotate")]
    Rotate {
        beta: Vec<f64>,
        factors: Vec<MeasureJson>,
    },
    #[serde(rename = "flip")]
    Flip { factors: Vec<MeasureJson> },
    #[serde(rename = "conv")]
    Conv { factors: Vec<MeasureJson> },
    #[serde(rename = "lk")]
    Lk { triplet: TripletJson },
    #[serde(rename = "planar")]
    Planar {
        dim: usize,
        atoms: Vec<PlanarAtomJson>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", try_from = "RawRho")]
pub enum RhoJson {
    #[serde(rename = "atomic")]
    Atomic {
        dim: usize,
        atoms: Vec<TorusAtomJson>,
    },
    #[serde(rename = "haar_kernel")]
    HaarKernel { scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletJson {
    pub d: usize,
    pub gamma_arg: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub rho: RhoJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddTripletJson {
    pub d: usize,
    pub v: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub tau: MeasureJson,
}

#[derive(Deserialize)]
enum MeasureKind {
    #[serde(rename = "atomic")]
    Atomic,
    #[serde(rename = "dirac")]
    Dirac,
    #[serde(rename = "haar")]
    Haar,
    #[serde(rename = "biP")]
    BiP,
    #[serde(rename = "biPstar")]
    BiPstar,
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "product")]
    Product,
    #[serde(rename = "rotate")]
    Rotate,
    #[serde(rename = "flip")]
    Flip,
    #[serde(rename = "conv")]
    Conv,
    #[serde(rename = "lk")]
    Lk,
    #[serde(rename = "planar")]
    Planar,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    theta: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    w: f64,
}

/// Flat form so that deserialization errors keep their exact path.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    kind: MeasureKind,
    dim: Option<usize>,
    atoms: Option<Vec<RawAtom>>,
    theta: Option<Vec<f64>>,
    c: Option<[f64; 2]>,
    beta: Option<Vec<f64>>,
    factors: Option<Vec<MeasureJson>>,
    triplet: Option<TripletJson>,
}

fn need<T>(v: Option<T>, kind: &str, field: &str) -> std::result::Result<T, String> {
    v.ok_or_else(|| format!("kind \"{kind}\" needs field \"{field}\""))
}

fn torus_atoms_raw(atoms: Vec<RawAtom>) -> std::result::Result<Vec<TorusAtomJson>, String> {
    atoms
        .into_iter()
        .enumerate()
        .map(|(i, a)| match (a.theta, a.x) {
            (Some(theta), None) => Ok(TorusAtomJson { theta, w: a.w }),
            _ => Err(format!(
                "atom {i} of a torus measure needs \"theta\" and no \"x\""
            )),
        })
        .collect()
}

impl TryFrom<RawMeasure> for MeasureJson {
    type Error = String;

    fn try_from(r: RawMeasure) -> std::result::Result<Self, String> {
        let (name, allowed): (&str, &[&str]) = match r.kind {
            MeasureKind::Atomic => ("atomic", &["dim", "atoms"]),
            MeasureKind::Dirac => ("dirac", &["theta"]),
            MeasureKind::Haar => ("haar", &[]),
            MeasureKind::BiP => ("biP", &[]),
            MeasureKind::BiPstar => ("biPstar", &[]),
            MeasureKind::Kappa => ("kappa", &["c"]),
            MeasureKind::Product => ("product", &["factors"]),
            MeasureKind::Rotate => ("rotate", &["beta", "factors"]),
            MeasureKind::Flip => ("flip", &["factors"]),
            MeasureKind::Conv => ("conv", &["factors"]),
            MeasureKind::Lk => ("lk", &["triplet"]),
            MeasureKind::Planar => ("planar", &["dim", "atoms"]),
        };
        let present = [
            ("dim", r.dim.is_some()),
            ("atoms", r.atoms.is_some()),
            ("theta", r.theta.is_some()),
            ("c", r.c.is_some()),
            ("beta", r.beta.is_some()),
            ("factors", r.factors.is_some()),
            ("triplet", r.triplet.is_some()),
        ];
        if let Some((f, _)) = present.iter().find(|(f, p)| *p && !allowed.contains(f)) {
            return Err(format!("kind \"{name}\" does not take field \"{f}\""));
        }
        Ok(match r.kind {
            MeasureKind::Atomic => MeasureJson::Atomic {
                dim: need(r.dim, name, "dim")?,
                atoms: torus_atoms_raw(need(r.atoms, name, "atoms")?)?,
            },
            MeasureKind::Dirac => MeasureJson::Dirac {
                theta: need(r.theta, name, "theta")?,
            },
            MeasureKind::Haar => MeasureJson::Haar,
            MeasureKind::BiP => MeasureJson::BiP,
            MeasureKind::BiPstar => MeasureJson::BiPstar,
            MeasureKind::Kappa => MeasureJson::Kappa {
                c: need(r.c, name, "c")?,
            },
            MeasureKind::Product => MeasureJson::Product {
                factors: need(r.factors, name, "factors")?,
            },
            MeasureKind::Rotate => MeasureJson::Rotate {
                beta: need(r.beta, name, "beta")?,
                factors: need(r.factors, name, "factors")?,
            },
            MeasureKind::Flip => MeasureJson::Flip {
                factors: need(r.factors, name, "factors")?,
            },
            MeasureKind::Conv => MeasureJson::Conv {
                factors: need(r.factors, name, "factors")?,
            },
            MeasureKind::Lk => MeasureJson::Lk {
                triplet: need(r.triplet, name, "triplet")?,
            },
            MeasureKind::Planar => MeasureJson::Planar {
                dim: need(r.dim, name, "dim")?,
                atoms: need(r.atoms, name, "atoms")?
                    .into_iter()
                    .enumerate()
                    .map(|(i, a)| match (a.x, a.theta) {
                        (Some(x), None) => Ok(PlanarAtomJson { x, w: a.w }),
                        _ => Err(format!(
                            "atom {i} of a planar measure needs \"x\" and no \"theta\""
                        )),
                    })
                    .collect::<std::result::Result<_, String>>()?,
            },
        })
    }
}

#[derive(Deserialize)]
enum RhoKind {
    #[serde(rename = "atomic")]
    Atomic,
    #[serde(rename = "haar_kernel")]
    HaarKernel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRho {
    kind: RhoKind,
    dim: Option<usize>,
    atoms: Option<Vec<RawAtom>>,
    scale: Option<f64>,
}

impl TryFrom<RawRho> for RhoJson {
    type Error = String;

    fn try_from(r: RawRho) -> std::result::Result<Self, String> {
        match r.kind {
            RhoKind::Atomic if r.scale.is_none() => Ok(RhoJson::Atomic {
                dim: need(r.dim, "atomic", "dim")?,
                atoms: torus_atoms_raw(need(r.atoms, "atomic", "atoms")?)?,
            }),
            RhoKind::HaarKernel if r.dim.is_none() && r.atoms.is_none() => {
                Ok(RhoJson::HaarKernel {
                    scale: need(r.scale, "haar_kernel", "scale")?,
                })
            }
            _ => Err("unexpected field for this Levy measure kind".into()),
        }
    }
}

/// Deserializes with a path-qualified error.
pub fn from_value<T: DeserializeOwned>(v: &Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Parses a JSON document with a path-qualified error.
pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn torus_atoms(
    dim: usize,
    atoms: &[TorusAtomJson],
    mode: MeasureMode,
) -> Result<AtomicTorusMeasure> {
    AtomicTorusMeasure::new(
        dim,
        mode,
        atoms.iter().map(|a| (a.theta.clone(), a.w)).collect(),
    )
}

fn one_factor(factors: &[MeasureJson], kind: &str) -> Result<MomentMeasure> {
    match factors {
        [m] => m.to_measure(),
        _ => Err(Error::InvalidMeasure(format!(
            "{kind} takes exactly one factor, got {}",
            factors.len()
        ))),
    }
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn torus_atoms_json(m: &AtomicTorusMeasure) -> Vec<TorusAtomJson> {
    m.atoms()
        .iter()
        .map(|a| TorusAtomJson {
            theta: values(&a.theta),
            w: a.w,
        })
        .collect()
}

impl MeasureJson {
    pub fn to_measure(&self) -> Result<MomentMeasure> {
        Ok(match self {
            MeasureJson::Atomic { dim, atoms } => {
                MomentMeasure::atomic(torus_atoms(*dim, atoms, MeasureMode::Probability)?)?
            }
            MeasureJson::Dirac { theta } => MomentMeasure::dirac(theta),
            MeasureJson::Haar => MomentMeasure::Haar,
            MeasureJson::BiP => MomentMeasure::BiHaarP,
            MeasureJson::BiPstar => MomentMeasure::BiHaarPStar,
            MeasureJson::Kappa { c } => MomentMeasure::kappa(Complex64::new(c[0], c[1]))?,
            MeasureJson::Product { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| {
                        Error::InvalidMeasure("product needs at least one factor".into())
                    })?
                    .to_measure()?;
                it.try_fold(first, |acc, f| {
                    Ok::<_, Error>(MomentMeasure::product(acc, f.to_measure()?))
                })?
            }
            MeasureJson::Rotate { beta, factors } => rotate(&one_factor(factors, "rotate")?, beta)?,
            MeasureJson::Flip { factors } => flip_star(&one_factor(factors, "flip")?)?,
            MeasureJson::Conv { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidMeasure("conv needs at least one factor".into()))?
                    .to_measure()?;
                it.try_fold(first, |acc, f| circ_convolve(&acc, &f.to_measure()?))?
            }
            MeasureJson::Lk { triplet } => MomentMeasure::levy_khintchine(triplet.to_triplet()?),
            MeasureJson::Planar { .. } => {
                return Err(Error::InvalidMeasure(
                    "a planar measure is not a torus measure".into(),
                ));
            }
        })
    }

    pub fn from_measure(m: &MomentMeasure) -> Self {
        let factors = |m: &MomentMeasure| vec![MeasureJson::from_measure(m)];
        match m {
            MomentMeasure::Atomic(a) => MeasureJson::Atomic {
                dim: a.dim(),
                atoms: torus_atoms_json(a),
            },
            MomentMeasure::Dirac(t) => MeasureJson::Dirac { theta: values(t) },
            MomentMeasure::Haar => MeasureJson::Haar,
            MomentMeasure::BiHaarP => MeasureJson::BiP,
            MomentMeasure::BiHaarPStar => MeasureJson::BiPstar,
            MomentMeasure::Kappa(c) => MeasureJson::Kappa { c: pair(*c) },
            MomentMeasure::Product(a, b) => MeasureJson::Product {
                factors: vec![MeasureJson::from_measure(a), MeasureJson::from_measure(b)],
            },
            MomentMeasure::Rotate(inner, beta) => MeasureJson::Rotate {
                beta: values(beta),
                factors: factors(inner),
            },
            MomentMeasure::Flip(inner) => MeasureJson::Flip {
                factors: factors(inner),
            },
            MomentMeasure::CircConv(f) => MeasureJson::Conv {
                factors: f.iter().map(MeasureJson::from_measure).collect(),
            },
            MomentMeasure::LevyKhintchine(t) => MeasureJson::Lk {
                triplet: TripletJson::from_triplet(t),
            },
        }
    }

    pub fn to_planar(&self, mode: MeasureMode) -> Result<PlanarAtomicMeasure> {
        match self {
            MeasureJson::Planar { dim, atoms } => PlanarAtomicMeasure::new(
                *dim,
                mode,
                atoms.iter().map(|a| (a.x.clone(), a.w)).collect(),
            ),
            _ => Err(Error::InvalidMeasure(
                "expected a measure of kind \"planar\"".into(),
            )),
        }
    }

    pub fn from_planar(m: &PlanarAtomicMeasure) -> Self {
        MeasureJson::Planar {
            dim: m.dim(),
            atoms: m
                .atoms()
                .iter()
                .map(|a| PlanarAtomJson {
                    x: a.x.clone(),
                    w: a.w,
                })
                .collect(),
        }
    }

    /// An atomic torus measure in the given mode.
    pub fn to_atomic(&self, mode: MeasureMode) -> Result<AtomicTorusMeasure> {
        match self {
            MeasureJson::Atomic { dim, atoms } => torus_atoms(*dim, atoms, mode),
            MeasureJson::Dirac { theta } => {
                AtomicTorusMeasure::new(theta.len(), mode, vec![(theta.clone(), 1.0)])
            }
            _ => Err(Error::InvalidMeasure(
                "expected a measure of kind \"atomic\" or \"dirac\"".into(),
            )),
        }
    }
}

impl TripletJson {
    pub fn to_triplet(&self) -> Result<MulLevyTriplet> {
        let rho = match &self.rho {
            RhoJson::Atomic { dim, atoms } => {
                LevyMeasureT::Atomic(torus_atoms(*dim, atoms, MeasureMode::Finite)?)
            }
            RhoJson::HaarKernel { scale } => LevyMeasureT::HaarKernelDensity { scale: *scale },
        };
        if self.gamma_arg.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: self.gamma_arg.len(),
            });
        }
        MulLevyTriplet::new(&self.gamma_arg, self.a.clone(), rho)
    }

    pub fn from_triplet(t: &MulLevyTriplet) -> Self {
        let rho = match t.rho() {
            LevyMeasureT::Atomic(m) => RhoJson::Atomic {
                dim: m.dim(),
                atoms: torus_atoms_json(m),
            },
            LevyMeasureT::HaarKernelDensity { scale } => RhoJson::HaarKernel { scale: *scale },
        };
        TripletJson {
            d: t.dim(),
            gamma_arg: values(t.gamma_arg()),
            a: t.a().to_vec(),
            rho,
        }
    }
}

impl AddTripletJson {
    pub fn to_triplet(&self) -> Result<AddLevyTriplet> {
        if self.v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: self.v.len(),
            });
        }
        AddLevyTriplet::new(
            self.v.clone(),
            self.a.clone(),
            self.tau.to_planar(MeasureMode::Levy)?,
        )
    }

    pub fn from_triplet(t: &AddLevyTriplet) -> Self {
        AddTripletJson {
            d: t.dim(),
            v: t.v().to_vec(),
            a: t.a().to_vec(),
            tau: MeasureJson::from_planar(t.tau()),
        }
    }
}

pub fn parse_measure(s: &str) -> Result<MomentMeasure> {
    from_str::<MeasureJson>(s)?.to_measure()
}

pub fn parse_triplet(s: &str) -> Result<MulLevyTriplet> {
    from_str::<TripletJson>(s)?.to_triplet()
}

pub fn parse_add_triplet(s: &str) -> Result<AddLevyTriplet> {
    from_str::<AddTripletJson>(s)?.to_triplet()
}

fn to_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

pub fn measure_to_string(m: &MomentMeasure) -> String {
    to_string(&MeasureJson::from_measure(m))
}

pub fn triplet_to_string(t: &MulLevyTriplet) -> String {
    to_string(&TripletJson::from_triplet(t))
}

pub fn add_triplet_to_string(t: &AddLevyTriplet) -> String {
    to_string(&AddTripletJson::from_triplet(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_atomic_and_round_trips() {
        let s = r#"{"kind":"atomic","dim":2,"atoms":[{"theta":[0.5,1.0],"w":0.25},{"theta":[0.0,-1.0],"w":0.75}]}"#;
        let m = parse_measure(s).unwrap();
        let out = measure_to_string(&m);
        assert_eq!(parse_measure(&out).unwrap(), m);
        assert_eq!(measure_to_string(&parse_measure(&out).unwrap()), out);
    }

    #[test]
    fn composite_round_trip() {
        let s = r#"{"kind":"conv","factors":[{"kind":"biP"},{"kind":"product","factors":[{"kind":"kappa","c":[0.3,0.1]},{"kind":"dirac","theta":[0.0]}]}]}"#;
        let m = parse_measure(s).unwrap();
        let out = measure_to_string(&m);
        assert_eq!(parse_measure(&out).unwrap(), m);
        let r = r#"{"kind":"rotate","beta":[0.1,0.2],"factors":[{"kind":"flip","factors":[{"kind":"biP"}]}]}"#;
        let m = parse_measure(r).unwrap();
        assert_eq!(parse_measure(&measure_to_string(&m)).unwrap(), m);
    }

    #[test]
    fn triplet_round_trip() {
        let s = r#"{"d":1,"gamma_arg":[0],"A":[[0]],"rho":{"kind":"atomic","dim":1,"atoms":[{"theta":[1.5707963267948966],"w":3.141592653589793}]}}"#;
        let t = parse_triplet(s).unwrap();
        assert_eq!(parse_triplet(&triplet_to_string(&t)).unwrap(), t);
        let h = parse_triplet(
            r#"{"d":1,"gamma_arg":[0.2],"A":[[0.5]],"rho":{"kind":"haar_kernel","scale":0.7}}"#,
        )
        .unwrap();
        assert_eq!(parse_triplet(&triplet_to_string(&h)).unwrap(), h);
        let a = parse_add_triplet(
            r#"{"d":2,"v":[0.1,0.2],"A":[[1,0],[0,1]],"tau":{"kind":"planar","dim":2,"atoms":[{"x":[1,2],"w":0.5}]}}"#,
        )
        .unwrap();
        assert_eq!(parse_add_triplet(&add_triplet_to_string(&a)).unwrap(), a);
    }

    #[test]
    fn errors_carry_paths() {
        let e = parse_measure(r#"{"kind":"atomic","dim":1,"atoms":[{"theta":[0.1],"w":"x"}]}"#)
            .unwrap_err();
        match e {
            Error::Parse { path, .. } => assert_eq!(path, "atoms[0].w"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_measure(r#"{"kind":"haar","extra":1}"#),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_measure(r#"{"kind":"nope"}"#),
            Err(Error::Parse { .. })
        ));
        assert!(
            parse_measure(r#"{"kind":"atomic","dim":1,"atoms":[{"theta":[0.1],"w":0.5}]}"#)
                .is_err()
        );
    }
}
