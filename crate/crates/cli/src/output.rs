use serde_json::Value;

/// Rounds to 10 significant digits.
pub fn sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree to 10 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(sig10(x)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json_line(mut v: Value) -> String {
    round_floats(&mut v);
    serde_json::to_string(&v).expect("JSON values always serialize")
}

pub fn to_json_pretty(mut v: Value) -> String {
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).expect("JSON values always serialize")
}

/// Human-readable number, 10 significant digits.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-4..1e12).contains(&a) {
        format!("{x:.9e}")
    } else {
        format!("{}", sig10(x))
    }
}
