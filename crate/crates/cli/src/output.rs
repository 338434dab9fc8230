use serde_json::{Map, Number, Value};

/// Rounds every float in a JSON tree to 12 significant digits so output is
/// stable across platforms. Non-finite numbers become null.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, round_floats(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    // avoid printing -0
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round12(x);
        if r == 0.0 {
            "0".into()
        } else if r.abs() < 1e-4 || r.abs() >= 1e15 {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

pub fn to_json_string(v: Value) -> String {
    serde_json::to_string_pretty(&round_floats(v)).expect("JSON values serialize")
}

/// CSV field with quoting when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-1e-300 * 1e-300), 0.0);
        let v = round_floats(json!({"a": [1.0000000000000002, 3], "b": f64::NAN}));
        assert_eq!(v, json!({"a": [1.0, 3], "b": null}));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("x"), "x");
        assert_eq!(fmt12(-0.0), "0");
        assert_eq!(fmt12(1e-12), "1e-12");
        assert_eq!(fmt12(0.25), "0.25");
    }
}
