//! Deterministic JSON emission: sorted object keys, integers kept as
//! integers, and floats printed with 17 significant digits so that every
//! finite `f64` round-trips bit for bit.

use nalgebra::{DMatrix, DVector};
use serde_json::Value;

/// Wraps a float as a JSON value; NaN and infinities become `null` since
/// JSON has no spelling for them.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// One scientific-notation rendering with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column vector as a JSON array of floats.
pub fn vector_value(v: &DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| float(x)).collect())
}

/// Matrix as a JSON array of rows.
pub fn matrix_value(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| float(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Serializes a value compactly with deterministic float text. Object keys
/// come out sorted because the underlying map is ordered by key.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value);
    out
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(f) = n.as_f64() {
                out.push_str(&format_f64(f));
            } else {
                out.push_str("null");
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization is infallible"));
        }
        Value::Array(items) => {
            out.push('[');
            for (idx, item) in items.iter().enumerate() {
                if idx > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (idx, (key, item)) in map.iter().enumerate() {
                if idx > 0 {
                    out.push(',');
                }
                out.push_str(
                    &serde_json::to_string(key).expect("string serialization is infallible"),
                );
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip_exactly() {
        for &x in &[
            0.1,
            1.0 / 3.0,
            -2.5e300,
            1e-15,
            std::f64::consts::PI,
            -0.0,
            6.02e23,
        ] {
            let text = to_json_string(&float(x));
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "text was {text}");
        }
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_json_string(&float(f64::NAN)), "null");
        assert_eq!(to_json_string(&float(f64::INFINITY)), "null");
    }

    #[test]
    fn integers_stay_integers() {
        assert_eq!(to_json_string(&json!(42)), "42");
        assert_eq!(to_json_string(&json!(-7)), "-7");
        assert_eq!(to_json_string(&json!(u64::MAX)), u64::MAX.to_string());
    }

    #[test]
    fn object_keys_are_sorted() {
        let v = json!({"zeta": 1, "alpha": 2, "mid": {"b": 1, "a": 2}});
        assert_eq!(
            to_json_string(&v),
            r#"{"alpha":2,"mid":{"a":2,"b":1},"zeta":1}"#
        );
    }

    #[test]
    fn strings_are_escaped() {
        let v = json!({"msg": "a\"b\nc"});
        assert_eq!(to_json_string(&v), r#"{"msg":"a\"b\nc"}"#);
    }

    #[test]
    fn float_text_is_scientific_with_full_precision() {
        assert_eq!(to_json_string(&float(1.0)), "1.0000000000000000e0");
        assert_eq!(to_json_string(&float(-0.5)), "-5.0000000000000000e-1");
    }

    #[test]
    fn vectors_and_matrices_serialize_as_nested_arrays() {
        let v = nalgebra::DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(
            to_json_string(&vector_value(&v)),
            "[1.0000000000000000e0,2.0000000000000000e0]"
        );
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let text = to_json_string(&matrix_value(&m));
        assert!(text.starts_with("[[1.0000000000000000e0,"));
    }
}
