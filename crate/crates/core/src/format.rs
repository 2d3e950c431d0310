//! Lossless text form of scalars shared by the CSV and JSON writers.

use std::str::FromStr;

use serde::{Serialize, Serializer};

/// 17 significant digits in scientific notation; non-finite values as
/// `inf`, `-inf` and `nan`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        // explicit exponent sign, as JSON number parsers normalize to it
        let text = format!("{x:.16e}");
        match text.split_once('e') {
            Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
            _ => text,
        }
    }
}

/// JSON value carrying exactly the digits of [`format_real`]: a number
/// when finite, a string otherwise.
pub fn real_to_json(x: f64) -> serde_json::Value {
    let text = format_real(x);
    if x.is_finite() {
        let num = serde_json::Number::from_str(&text).expect("scientific notation is valid JSON");
        serde_json::Value::Number(num)
    } else {
        serde_json::Value::String(text)
    }
}

/// Rewrites every non-integer number in a JSON tree into the
/// [`format_real`] form; integers are left alone.
pub fn canonical_json(value: &mut serde_json::Value) {
    use serde_json::Value;
    match value {
        Value::Number(num) if !(num.is_u64() || num.is_i64()) => {
            if let Some(x) = num.as_f64() {
                *value = real_to_json(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonical_json),
        Value::Object(map) => map.values_mut().for_each(canonical_json),
        _ => {}
    }
}

/// `serialize_with` adapter for `f64` fields.
pub fn serialize_real<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    real_to_json(*x).serialize(serializer)
}

/// Inverse of [`format_real`].
pub fn parse_real(text: &str) -> Option<f64> {
    match text.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        other => other.parse().ok(),
    }
}
