//! Canonical JSON writer: object keys sorted, floats at 17 significant
//! digits, LF-terminated. Two runs over identical data produce identical
//! bytes, which the golden-file tests rely on.

use serde::Serialize;
use serde_json::Value;

/// Serializes any value to canonical JSON text.
///
/// `serde_json`'s default map preserves sorted key order; floats are
/// rewritten in scientific notation with 17 significant digits so they
/// round-trip f64 exactly and never depend on shortest-representation
/// heuristics.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&value, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().expect("number is i64, u64 or f64");
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => write_string(s, out),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(key, out);
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Sample {
        zebra: f64,
        alpha: Vec<u64>,
        note: String,
    }

    #[test]
    fn keys_sorted_and_floats_fixed_width() {
        let s = Sample {
            zebra: 0.1,
            alpha: vec![1, 2],
            note: "a\"b".into(),
        };
        let json = to_canonical_json(&s).unwrap();
        assert_eq!(
            json,
            "{\"alpha\":[1,2],\"note\":\"a\\\"b\",\"zebra\":1.0000000000000001e-1}\n"
        );
    }

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, 59.9876543210123, 1e-300, -2.5e17] {
            let json = to_canonical_json(&v).unwrap();
            let back: f64 = json.trim().parse().unwrap();
            assert_eq!(back, v);
        }
    }
}
