//! Byte-stable JSON rendering: object keys sorted, floats printed with a
//! fixed 9 decimal places, integers unchanged.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const FLOAT_DECIMALS: usize = 9;

/// Pretty (two-space indented) rendering with a trailing newline.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, Some(0));
    out.push('\n');
    Ok(out)
}

/// Single-line rendering with a trailing newline.
pub fn to_canonical_line<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, None);
    out.push('\n');
    Ok(out)
}

fn format_float(x: f64) -> String {
    let s = format!("{x:.FLOAT_DECIMALS$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn newline(out: &mut String, indent: Option<usize>) {
    if let Some(level) = indent {
        out.push('\n');
        for _ in 0..level {
            out.push_str("  ");
        }
    }
}

fn write_value(out: &mut String, v: &Value, indent: Option<usize>) {
    let inner = indent.map(|l| l + 1);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(0.0)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => {
            // serde_json's escaping is already canonical
            out.push_str(&serde_json::to_string(s).unwrap_or_default());
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, inner);
                write_value(out, item, inner);
            }
            newline(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, inner);
                out.push_str(&serde_json::to_string(k).unwrap_or_default());
                out.push(':');
                if indent.is_some() {
                    out.push(' ');
                }
                write_value(out, &map[k], inner);
            }
            newline(out, indent);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_fixed_floats() {
        let v = json!({"b": 1.0, "a": [1, 0.1234567891234, -0.0000000001], "c": {"z": null, "y": "q\"x"}});
        assert_eq!(
            to_canonical_line(&v).unwrap(),
            "{\"a\":[1,0.123456789,0.000000000],\"b\":1.000000000,\"c\":{\"y\":\"q\\\"x\",\"z\":null}}\n"
        );
        let pretty = to_canonical_string(&json!({"k": [], "j": {}})).unwrap();
        assert_eq!(pretty, "{\n  \"j\": {},\n  \"k\": []\n}\n");
    }

    #[test]
    fn output_parses_back() {
        let v = json!({"x": [1.5, 2, "s"], "y": {"n": -3.25}});
        let text = to_canonical_string(&v).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
