use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::CliError;

/// `x` with 15 significant digits, in fixed notation for moderate exponents.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let fixed = format!("{:.*}", (14 - exp) as usize, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Rounds `x` to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.14e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Rounds every float in a JSON value to 15 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round15(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn complex_json(c: Complex64) -> Value {
    serde_json::json!([c.re, c.im])
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        Csv {
            buf: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, ints: &[i64], floats: &[f64]) {
        let mut fields: Vec<String> = ints.iter().map(|i| i.to_string()).collect();
        fields.extend(floats.iter().map(|&x| sig15(x)));
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Header `p1..pd` followed by `extra`.
pub fn p_header(prefix: &[&str], dim: usize, extra: &[&str]) -> Vec<String> {
    prefix
        .iter()
        .map(|s| s.to_string())
        .chain((1..=dim).map(|j| format!("p{j}")))
        .chain(extra.iter().map(|s| s.to_string()))
        .collect()
}

pub fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string(&round_json(v)).expect("serializable");
    s.push('\n');
    s
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Validation(format!("cannot write output: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(0.5), "0.5");
        assert_eq!(sig15(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(sig15(-std::f64::consts::PI.exp()), "-23.1406926327793");
        assert_eq!(sig15(1e-20), "1e-20");
        assert_eq!(sig15(1.0 / 3.0 * 1e-7), "3.33333333333333e-8");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(1.0), "1");
        assert_eq!(round15(round15(0.1 + 0.2)), round15(0.1 + 0.2));
    }
}
