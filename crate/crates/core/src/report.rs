//! Report emission: JSON with 17 significant digits, CSV with 12, written
//! atomically through a temporary file in the target directory.

use std::io::Write;
use std::path::Path;

use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// Significant digits of floating-point numbers in JSON reports.
pub const JSON_DIGITS: usize = 17;
/// Significant digits of floating-point numbers in CSV reports.
pub const CSV_DIGITS: usize = 12;

/// Decimal rendering of `x` rounded to `digits` significant digits, with
/// trailing zeros removed. Plain notation is used for moderate exponents.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = mantissa
        .strip_prefix('-')
        .map_or(("", mantissa), |m| ("-", m));
    let digits_only: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits_only = digits_only.trim_end_matches('0');
    let digits_only = if digits_only.is_empty() {
        "0"
    } else {
        digits_only
    };
    if (-5..digits as i32).contains(&exp) {
        let point = exp + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits_only)
        } else if point as usize >= digits_only.len() {
            format!(
                "{}{}.0",
                digits_only,
                "0".repeat(point as usize - digits_only.len())
            )
        } else {
            let (int, frac) = digits_only.split_at(point as usize);
            format!("{int}.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = digits_only.split_at(1);
        let rest = if rest.is_empty() { "0" } else { rest };
        format!("{sign}{lead}.{rest}e{exp}")
    }
}

fn is_float(n: &Number) -> bool {
    n.to_string().contains(['.', 'e', 'E'])
}

/// Rewrites every floating-point number to `digits` significant digits and
/// every non-finite one to `null`; integers are left untouched.
pub fn round_floats(v: &Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if is_float(n) => match n.as_f64() {
            Some(x) if x.is_finite() => {
                let s = format_significant(x, digits);
                Value::Number(serde_json::from_str(&s).expect("formatted number parses"))
            }
            _ => Value::Null,
        },
        Value::Array(items) => {
            Value::Array(items.iter().map(|x| round_floats(x, digits)).collect())
        }
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, x)| (k.clone(), round_floats(x, digits)))
                .collect(),
        ),
        other => other.clone(),
    }
}

/// Serializes a value as JSON with non-finite floats mapped to `null`.
pub fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON text with 17 significant digits and a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s =
        serde_json::to_string_pretty(&round_floats(v, JSON_DIGITS)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// A CSV table: one header row and string-formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Flattens the top-level scalar fields of a JSON object into `key,value` rows.
    pub fn from_scalars(v: &Value) -> Self {
        let mut t = Table::new(&["key", "value"]);
        if let Value::Object(map) = v {
            for (k, x) in map {
                match x {
                    Value::Array(_) | Value::Object(_) => {}
                    _ => t.push(vec![k.clone(), csv_value(x)]),
                }
            }
        }
        t
    }

    pub fn text(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)
            .map_err(|e| Error::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// A float cell with 12 significant digits.
pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format_significant(x, CSV_DIGITS)
    } else {
        String::new()
    }
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if is_float(n) => n.as_f64().map(csv_float).unwrap_or_default(),
        other => other.to_string(),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(
            format_significant(std::f64::consts::LN_2, 17),
            "0.69314718055994529"
        );
        assert_eq!(format_significant(0.5, 17), "0.5");
        assert_eq!(format_significant(-1234.5, 12), "-1234.5");
        assert_eq!(format_significant(1e-9, 12), "1.0e-9");
        assert_eq!(format_significant(3.0, 17), "3.0");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
    }

    #[test]
    fn roundtrip_is_exact_at_17_digits() {
        for x in [
            0.1,
            1.0 / 3.0,
            6.02214076e23,
            -2.5e-300,
            std::f64::consts::PI,
        ] {
            assert_eq!(format_significant(x, 17).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn integers_survive_rounding() {
        let v = serde_json::json!({"cutoff": 10, "value": 0.1, "bad": f64::NAN});
        let r = round_floats(&v, 17);
        assert_eq!(r["cutoff"], serde_json::json!(10));
        assert!(r["bad"].is_null());
    }
}
