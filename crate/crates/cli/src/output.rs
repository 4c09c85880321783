//! JSON and CSV writers.
//!
//! CSV flattening: an array of objects is one row per element; an object
//! whose values are all arrays becomes the concatenation of those tables
//! with a leading `section` column; anything else is a single row. Nested
//! objects contribute `parent.child` columns, quaternions `key.w` .. `key.z`.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::Format;

pub fn write(v: &Value, format: Format, out: Option<&Path>) -> std::io::Result<()> {
    let mut buf = match format {
        Format::Json => serde_json::to_vec_pretty(v)?,
        Format::Csv => to_csv(v)?,
    };
    if format == Format::Json {
        buf.push(b'\n');
    }
    match out {
        Some(p) => std::fs::write(p, buf),
        None => std::io::stdout().lock().write_all(&buf),
    }
}

fn is_quaternion(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.len() == 4 && a.iter().all(Value::is_number))
}

fn flatten(prefix: &str, v: &Value, row: &mut Map<String, Value>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, row);
            }
        }
        q if is_quaternion(q) => {
            for (c, x) in ["w", "x", "y", "z"].iter().zip(q.as_array().unwrap()) {
                row.insert(key(c), x.clone());
            }
        }
        other => {
            row.insert(if prefix.is_empty() { "value".into() } else { prefix.into() }, other.clone());
        }
    }
}

fn rows(v: &Value) -> Vec<Map<String, Value>> {
    let one = |x: &Value| {
        let mut r = Map::new();
        flatten("", x, &mut r);
        r
    };
    match v {
        Value::Array(a) if !is_quaternion(v) => a.iter().map(one).collect(),
        Value::Object(m) if !m.is_empty() && m.values().all(Value::is_array) => m
            .iter()
            .flat_map(|(section, t)| {
                t.as_array().unwrap().iter().map(move |x| {
                    let mut r = one(x);
                    r.insert("section".into(), Value::String(section.clone()));
                    r
                })
            })
            .collect(),
        other => vec![one(other)],
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(x) => x.to_string(),
    }
}

pub fn to_csv(v: &Value) -> std::io::Result<Vec<u8>> {
    let rows = rows(v);
    let mut cols: Vec<String> = vec![];
    if rows.iter().any(|r| r.contains_key("section")) {
        cols.push("section".into());
    }
    let mut seen: BTreeSet<String> = cols.iter().cloned().collect();
    for r in &rows {
        for k in r.keys() {
            if seen.insert(k.clone()) {
                cols.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&cols)?;
    for r in &rows {
        w.write_record(cols.iter().map(|c| cell(r.get(c))))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn quaternions_split_into_columns() {
        let v = json!([{"point": [1.0, 0.0, 0.0, 0.0], "value": [0.0, 1.0, 2.0, 3.0]}]);
        let s = String::from_utf8(to_csv(&v).unwrap()).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "point.w,point.x,point.y,point.z,value.w,value.x,value.y,value.z");
        assert_eq!(lines.next().unwrap(), "1.0,0.0,0.0,0.0,0.0,1.0,2.0,3.0");
    }

    #[test]
    fn sections_are_concatenated() {
        let v = json!({"a": [{"n": 1}], "b": [{"n": 2, "s": "x,y"}]});
        let s = String::from_utf8(to_csv(&v).unwrap()).unwrap();
        assert_eq!(s, "section,n,s\na,1,\nb,2,\"x,y\"\n");
    }
}
