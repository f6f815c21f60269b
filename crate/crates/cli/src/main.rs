//! `bitorus` command-line front end.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use bitorus::idempotents::{
    classify_id_exception, classify_idempotent, has_p_factor, in_p_times_report, IdException,
};
use bitorus::json::{from_str, from_value, AddTripletJson, MeasureJson, TripletJson};
use bitorus::levy::{diagram_check, wrap_triplet, AddLevyTriplet, MulLevyTriplet};
use bitorus::limits::{
    compound_planar, gaussian_planar, limit_check, poisson_planar, wrap_array, TriangularArray,
};
use bitorus::measures::{
    bifree_convolve_special, circ_convolve, wrap_pushforward, MeasureMode, MomentMeasure,
};
use bitorus::numeric::integer_box;
use bitorus::series::u_series;
use bitorus::uniqueness::{
    l_unique_decide, parse_rational, triplet_equiv, AtomPair, EquivWitness, UniquenessVerdict,
};
use bitorus::Error;

use output::{complex_json, emit, json_text, p_header, Csv};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Unsupported(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_unsupported() {
            CliError::Unsupported(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesPart {
    Divided,
    U,
    N,
    P,
}

#[derive(Parser, Debug)]
#[command(
    name = "bitorus",
    version,
    about = "Infinitely divisible laws on tori: moments, convolutions, Levy triplets and limits"
)]
struct Cli {
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment table over the box |p|∞ ≤ pmax.
    Moments {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 2)]
        pmax: i64,
    },
    /// Classical (or, with --bifree, bi-free) convolution of two measures.
    Convolve {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        bifree: bool,
        /// Moment box for CSV output.
        #[arg(long, default_value_t = 2)]
        pmax: i64,
    },
    /// Wraps a planar measure or an additive triplet onto the torus.
    Wrap {
        #[arg(long, conflicts_with = "triplet", required_unless_present = "triplet")]
        measure: Option<String>,
        #[arg(long)]
        triplet: Option<String>,
        /// Conjugate the second coordinate.
        #[arg(long)]
        opposite: bool,
    },
    /// Characteristic function of a multiplicative Levy triplet.
    LkEval {
        #[arg(long)]
        triplet: String,
        #[arg(long, default_value_t = 2)]
        pmax: i64,
    },
    /// Generating series of a triplet on the bi-torus.
    USeries {
        #[arg(long)]
        triplet: String,
        #[arg(long = "K", default_value_t = 8)]
        k: usize,
        #[arg(long, value_enum, default_value_t = SeriesPart::Divided)]
        series: SeriesPart,
    },
    /// Runs a triangular array against its limiting triplet.
    LimitRun {
        #[arg(long)]
        array: String,
        /// Comma-separated levels.
        #[arg(long, value_delimiter = ',', default_values_t = vec![100u64, 1000, 10000])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        pmax: i64,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Idempotent and exceptional-form classification on the bi-torus.
    Classify {
        #[arg(long)]
        measure: String,
        #[arg(long = "K", default_value_t = 10)]
        k: i64,
    },
    /// L-uniqueness verdict for one symmetric atom pair.
    LUnique {
        /// Exact cos φ as a rational, e.g. 1/3.
        #[arg(
            long,
            conflicts_with = "phi",
            required_unless_present = "phi",
            allow_hyphen_values = true
        )]
        cos: Option<String>,
        /// φ in radians.
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
    },
    /// Equivalence of two Levy triplets on the circle.
    TripletEquiv {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long = "N", default_value_t = 50)]
        n: i64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compares the wrapped additive law with the bi-free path.
    DiagramCheck {
        #[arg(long)]
        triplet: String,
        #[arg(long, default_value_t = 20)]
        pmax: i64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn read_input(arg: &str) -> CliResult<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| CliError::Validation(format!("cannot read {arg}: {e}")))
    }
}

fn parse<T: serde::de::DeserializeOwned>(arg: &str) -> CliResult<T> {
    Ok(from_str(&read_input(arg)?)?)
}

fn measure(arg: &str) -> CliResult<MomentMeasure> {
    Ok(parse::<MeasureJson>(arg)?.to_measure()?)
}

fn triplet(arg: &str) -> CliResult<MulLevyTriplet> {
    Ok(parse::<TripletJson>(arg)?.to_triplet()?)
}

fn add_triplet(arg: &str) -> CliResult<AddLevyTriplet> {
    Ok(parse::<AddTripletJson>(arg)?.to_triplet()?)
}

fn require_pmax(pmax: i64) -> CliResult<()> {
    if pmax < 0 {
        return Err(CliError::Validation("pmax must be non-negative".into()));
    }
    Ok(())
}

fn moment_table(m: &MomentMeasure, pmax: i64, format: Format) -> CliResult<String> {
    require_pmax(pmax)?;
    let rows = m.moment_table(pmax);
    Ok(match format {
        Format::Csv => {
            let mut csv = Csv::new(&p_header(&[], m.dim(), &["re", "im"]));
            for (p, v) in rows {
                csv.row(&p, &[v.re, v.im]);
            }
            csv.finish()
        }
        Format::Json => json_text(json!({
            "dim": m.dim(),
            "pmax": pmax,
            "rows": rows.iter().map(|(p, v)| json!({"p": p, "re": v.re, "im": v.im})).collect::<Vec<_>>(),
        })),
    })
}

fn json_only(format: Option<Format>) -> CliResult<()> {
    if format == Some(Format::Csv) {
        return Err(CliError::Validation("this command only emits JSON".into()));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomSpec {
    levy: AddTripletJson,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ArraySpec {
    Builtin(BuiltinSpec),
    Custom { custom: CustomSpec },
}

#[derive(Deserialize)]
#[serde(tag = "builtin", deny_unknown_fields)]
enum BuiltinSpec {
    #[serde(rename = "gaussian")]
    Gaussian {
        #[serde(rename = "A")]
        a: [[f64; 2]; 2],
    },
    #[serde(rename = "poisson")]
    Poisson { r: f64, jump: MeasureJson },
}

/// Torus array and its limiting triplet.
fn build_array(spec: &str) -> CliResult<(TriangularArray, MulLevyTriplet)> {
    let text = read_input(spec)?;
    let value: Value = from_str(&text)?;
    let parsed: ArraySpec = if value.get("builtin").is_some() {
        ArraySpec::Builtin(from_value(&value)?)
    } else if value.get("custom").is_some() {
        ArraySpec::Custom {
            custom: from_value(&value["custom"])?,
        }
    } else {
        return Err(CliError::Validation(
            "array spec needs a \"builtin\" or \"custom\" key".into(),
        ));
    };
    let (planar, additive) = match parsed {
        ArraySpec::Builtin(BuiltinSpec::Gaussian { a }) => {
            let t = AddLevyTriplet::new(
                vec![0.0; 2],
                a.iter().map(|r| r.to_vec()).collect(),
                empty_planar(2)?,
            )?;
            (gaussian_planar(a)?, t)
        }
        ArraySpec::Builtin(BuiltinSpec::Poisson { r, jump }) => {
            let mu = jump.to_planar(MeasureMode::Probability)?;
            let d = mu.dim();
            let v: Vec<f64> = (0..d)
                .map(|j| {
                    r * mu
                        .atoms()
                        .iter()
                        .map(|a| a.w * a.x[j] / (1.0 + a.x.iter().map(|x| x * x).sum::<f64>()))
                        .sum::<f64>()
                })
                .collect();
            let tau = mu.scale(r, MeasureMode::Levy)?;
            let t = AddLevyTriplet::new(v, vec![vec![0.0; d]; d], tau)?;
            (poisson_planar(r, mu)?, t)
        }
        ArraySpec::Custom { custom } => {
            let t = custom.levy.to_triplet()?;
            (compound_planar(&t)?, t)
        }
    };
    Ok((wrap_array(&planar)?, wrap_triplet(&additive)?))
}

fn empty_planar(d: usize) -> CliResult<bitorus::measures::PlanarAtomicMeasure> {
    Ok(bitorus::measures::PlanarAtomicMeasure::new(
        d,
        MeasureMode::Levy,
        Vec::new(),
    )?)
}

fn verdict_json(v: &UniquenessVerdict) -> Value {
    match v {
        UniquenessVerdict::Unique => json!({"verdict": "Unique"}),
        UniquenessVerdict::Enumerated(list) => json!({
            "verdict": "Enumerated",
            "members": list.iter().map(|p| json!({"phi": p.phi, "c": p.c, "d": p.d})).collect::<Vec<_>>(),
        }),
        UniquenessVerdict::Unknown(reason) => json!({"verdict": "Unknown", "reason": reason}),
    }
}

fn run(cli: Cli) -> CliResult<String> {
    let format = cli.format;
    match cli.command {
        Command::Moments { measure: m, pmax } => {
            moment_table(&measure(&m)?, pmax, format.unwrap_or(Format::Csv))
        }
        Command::Convolve { a, b, bifree, pmax } => {
            let (a, b) = (measure(&a)?, measure(&b)?);
            let r = if bifree {
                bifree_convolve_special(&a, &b)?
            } else {
                circ_convolve(&a, &b)?
            };
            match format.unwrap_or(Format::Json) {
                Format::Json => Ok(json_text(
                    serde_json::to_value(MeasureJson::from_measure(&r)).expect("serializable"),
                )),
                Format::Csv => moment_table(&r, pmax, Format::Csv),
            }
        }
        Command::Wrap {
            measure: m,
            triplet: t,
            opposite,
        } => {
            json_only(format)?;
            if let Some(m) = m {
                let mu = parse::<MeasureJson>(&m)?.to_planar(MeasureMode::Finite)?;
                let w = wrap_pushforward(&mu, opposite)?;
                let atoms: Vec<Value> = w
                    .atoms()
                    .iter()
                    .map(|a| json!({"theta": bitorus::measures::values(&a.theta), "w": a.w}))
                    .collect();
                Ok(json_text(
                    json!({"kind": "atomic", "dim": w.dim(), "atoms": atoms}),
                ))
            } else {
                let t = add_triplet(t.as_deref().expect("clap requires one input"))?;
                let mut w = wrap_triplet(&t)?;
                if opposite {
                    w = w.flip()?;
                }
                Ok(json_text(
                    serde_json::to_value(TripletJson::from_triplet(&w)).expect("serializable"),
                ))
            }
        }
        Command::LkEval { triplet: t, pmax } => {
            require_pmax(pmax)?;
            let t = triplet(&t)?;
            let pts = integer_box(t.dim(), pmax);
            let vals = pts
                .iter()
                .map(|p| Ok((p.clone(), t.char(p)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut csv = Csv::new(&p_header(&[], t.dim(), &["re", "im"]));
                    for (p, v) in &vals {
                        csv.row(p, &[v.re, v.im]);
                    }
                    csv.finish()
                }
                Format::Json => json_text(json!({
                    "rows": vals.iter().map(|(p, v)| json!({"p": p, "re": v.re, "im": v.im})).collect::<Vec<_>>(),
                })),
            })
        }
        Command::USeries {
            triplet: t,
            k,
            series,
        } => {
            let s = u_series(&triplet(&t)?, k)?;
            let part = match series {
                SeriesPart::Divided => &s.divided,
                SeriesPart::U => &s.u,
                SeriesPart::N => &s.n,
                SeriesPart::P => &s.p,
            };
            let coeffs: Vec<(i64, i64, Complex64)> = (0..=k)
                .flat_map(|i| (0..=k).map(move |j| (i, j)))
                .map(|(i, j)| (i as i64, j as i64, part.coeff(i, j)))
                .collect();
            Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut csv = Csv::new(&["i", "j", "re", "im"].map(String::from));
                    for (i, j, v) in &coeffs {
                        csv.row(&[*i, *j], &[v.re, v.im]);
                    }
                    csv.finish()
                }
                Format::Json => json_text(json!({
                    "K": k,
                    "coefficients": coeffs.iter().map(|(i, j, v)| json!({"i": i, "j": j, "re": v.re, "im": v.im})).collect::<Vec<_>>(),
                })),
            })
        }
        Command::LimitRun {
            array,
            n,
            pmax,
            tol,
            theta,
        } => {
            require_pmax(pmax)?;
            let (mut arr, target) = build_array(&array)?;
            if let Some(theta) = theta {
                arr = arr.with_theta(theta)?;
            }
            let rep = limit_check(&arr, &target, &n, pmax, tol)?;
            Ok(match format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut csv = Csv::new(&p_header(&["n"], arr.dim(), &["error"]));
                    for pt in &rep.points {
                        let mut ints = vec![pt.n as i64];
                        ints.extend(&pt.p);
                        csv.row(&ints, &[pt.error]);
                    }
                    csv.finish()
                }
                Format::Json => json_text(json!({
                    "passes": rep.passes,
                    "tol": rep.tol,
                    "max_error": rep.max_error.iter().map(|(n, e)| json!({"n": n, "error": e})).collect::<Vec<_>>(),
                    "trend": rep.trend.iter().map(|t| json!({
                        "n": t.n, "gamma_gap": t.gamma_gap, "l_gap": t.l_gap, "tail_gap": t.tail_gap,
                    })).collect::<Vec<_>>(),
                })),
            })
        }
        Command::Classify { measure: m, k } => {
            json_only(format)?;
            let m = measure(&m)?;
            let kind = classify_idempotent(&m, k)?;
            let (p_factor, c) = has_p_factor(&m, k)?;
            let pt = in_p_times_report(&m, false)?;
            let (exception, exception_c) = if pt.in_p_times {
                (Value::Null, Value::Null)
            } else {
                match classify_id_exception(&m, k)? {
                    IdException::PKappaForm(c) => (json!("PKappaForm"), complex_json(c)),
                    other => (json!(format!("{other:?}")), Value::Null),
                }
            };
            Ok(json_text(json!({
                "idempotent": format!("{kind:?}"),
                "P_factor": p_factor,
                "c": complex_json(c),
                "in_P_times": pt.in_p_times,
                "exception_class": exception,
                "exception_c": exception_c,
            })))
        }
        Command::LUnique { cos, phi, c, d } => {
            json_only(format)?;
            let pair = match (cos, phi) {
                (Some(q), _) => AtomPair::from_cos(parse_rational(&q)?, c, d)?,
                (None, Some(phi)) => AtomPair::new(phi, c, d)?,
                (None, None) => return Err(CliError::Validation("give --cos or --phi".into())),
            };
            Ok(json_text(verdict_json(&l_unique_decide(&pair)?)))
        }
        Command::TripletEquiv { a, b, n, tol } => {
            json_only(format)?;
            let r = triplet_equiv(&triplet(&a)?, &triplet(&b)?, n, tol)?;
            let witness = match r.witness {
                None => Value::Null,
                Some(EquivWitness::Drift) => json!({"kind": "drift"}),
                Some(EquivWitness::Gaussian) => json!({"kind": "gaussian"}),
                Some(EquivWitness::EvenMass { phi }) => json!({"kind": "even_mass", "phi": phi}),
                Some(EquivWitness::Congruence { n }) => json!({"kind": "congruence", "n": n}),
            };
            Ok(json_text(
                json!({"verdict": format!("{:?}", r.verdict), "witness": witness}),
            ))
        }
        Command::DiagramCheck {
            triplet: t,
            pmax,
            tol,
        } => {
            json_only(format)?;
            let r = diagram_check(&add_triplet(&t)?, pmax)?;
            Ok(json_text(json!({
                "pmax": r.pmax,
                "points": r.points,
                "max_discrepancy": r.max_discrepancy,
                "worst_p": r.worst_p,
                "passes": r.passes(tol),
            })))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = run(cli).and_then(|text| emit(&text, out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Unsupported(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
