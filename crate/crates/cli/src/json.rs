//! JSON writer that prints every float with 17 significant digits, so a
//! report can be parsed back to the exact binary value.

use serde_json::Value;

pub fn render(v: &Value, pretty: bool) -> String {
    let mut out = String::new();
    write(v, pretty, 0, &mut out);
    out
}

fn float(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of reports
        "0.0000000000000000e0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn newline(pretty: bool, depth: usize, out: &mut String) {
    if pretty {
        out.push('\n');
        out.extend(std::iter::repeat_n("  ", depth));
    }
}

fn write(v: &Value, pretty: bool, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short arrays of scalars stay on one line
            let flat = items.iter().all(|i| !i.is_array() && !i.is_object()) && items.len() <= 4;
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if pretty && flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    newline(pretty, depth + 1, out);
                }
                write(item, pretty, depth + 1, out);
            }
            if !flat {
                newline(pretty, depth, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                newline(pretty, depth + 1, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                if pretty {
                    out.push(' ');
                }
                write(item, pretty, depth + 1, out);
            }
            newline(pretty, depth, out);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip() {
        let x = 2f64.ln() * 2.0;
        let s = render(&json!({ "e": x, "n": 3 }), false);
        assert_eq!(s, format!("{{\"e\":{x:.16e},\"n\":3}}"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["e"].as_f64().unwrap(), x);
    }

    #[test]
    fn seventeen_digits() {
        let s = render(&json!(0.1), false);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn pretty_only_adds_whitespace() {
        let v = json!({ "a": [1.5, 2.5], "b": { "c": "x y", "d": [[0, 1, 0.25]] } });
        let compact = render(&v, false);
        let pretty = render(&v, true);
        let squeezed: String = pretty.split('"').enumerate()
            .map(|(k, part)| if k % 2 == 1 { format!("\"{part}\"") } else { part.split_whitespace().collect() })
            .collect();
        assert_eq!(squeezed, compact);
        let a: Value = serde_json::from_str(&compact).unwrap();
        let b: Value = serde_json::from_str(&pretty).unwrap();
        assert_eq!(a, b);
    }
}
