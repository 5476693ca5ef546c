//! `--override key=value` on the raw scenario JSON.
//!
//! Keys are dotted paths (`geometry.rows`, `staircase.period_s`); numeric
//! segments index arrays. Values are parsed as JSON when possible, otherwise
//! taken as strings, so `modulation=qpsk` and `noise_variance=1e-3` both work.

use serde_json::Value;

pub fn parse(spec: &str) -> Result<(String, Value), String> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| format!("override `{spec}` is not of the form key=value"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(format!("override `{spec}` has an empty key segment"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

/// Sets `path` in `root`, creating intermediate objects as needed.
pub fn apply(root: &mut Value, path: &str, value: Value) -> Result<(), String> {
    let mut node = root;
    let segments: Vec<&str> = path.split('.').collect();
    let (last, parents) = segments.split_last().expect("non-empty path");
    for seg in parents {
        node = child(node, seg, path)?;
    }
    if node.is_null() {
        *node = Value::Object(Default::default());
    }
    match node {
        Value::Object(map) => {
            map.insert(last.to_string(), value);
            Ok(())
        }
        Value::Array(items) => {
            let i = index(last, items.len(), path)?;
            items[i] = value;
            Ok(())
        }
        _ => Err(format!(
            "override `{path}`: `{last}` is not inside an object or array"
        )),
    }
}

fn child<'v>(node: &'v mut Value, seg: &str, path: &str) -> Result<&'v mut Value, String> {
    if node.is_null() {
        *node = Value::Object(Default::default());
    }
    match node {
        Value::Object(map) => Ok(map.entry(seg.to_string()).or_insert(Value::Null)),
        Value::Array(items) => {
            let i = index(seg, items.len(), path)?;
            Ok(&mut items[i])
        }
        _ => Err(format!("override `{path}`: cannot descend into `{seg}`")),
    }
}

fn index(seg: &str, len: usize, path: &str) -> Result<usize, String> {
    match seg.parse::<usize>() {
        Ok(i) if i < len => Ok(i),
        _ => Err(format!(
            "override `{path}`: `{seg}` is not an index below {len}"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_and_typed() {
        let mut v = json!({"geometry": {"rows": 4}, "points": [{"role": "feed"}]});
        for spec in [
            "geometry.rows=1",
            "modulation=qpsk",
            "points.0.role=\"receive\"",
            "input.offset_hz=2e6",
        ] {
            let (k, val) = parse(spec).unwrap();
            apply(&mut v, &k, val).unwrap();
        }
        assert_eq!(
            v,
            json!({
                "geometry": {"rows": 1},
                "points": [{"role": "receive"}],
                "modulation": "qpsk",
                "input": {"offset_hz": 2e6}
            })
        );
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(parse("no_equals").is_err());
        assert!(parse("a..b=1").is_err());
        let mut v = json!({"points": [], "name": "x"});
        assert!(apply(&mut v, "points.3", json!(1)).is_err());
        assert!(apply(&mut v, "name.inner", json!(1)).is_err());
    }
}
