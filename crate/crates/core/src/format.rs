//! The JSON algebra file format.
//!
//! ```json
//! {"elements": ["-2", "-1"], "name": "A", "ops": {"f": {"arity": 2, "table": [[0, 1], [1, 1]]}}, "size": 2}
//! ```
//!
//! `elements` is optional. Tables nest to the depth of the arity and are
//! row-major; a constant's table is a bare integer. Output keys are sorted
//! and lines end in LF.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::algebra::{Elem, FiniteAlgebra, Signature};
use crate::error::{Error, Result};

/// Operation entries in file order, duplicates kept.
#[derive(Debug, Default)]
pub struct OpsEntries(pub Vec<(String, Value)>);

impl<'de> Deserialize<'de> for OpsEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntriesVisitor;
        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = OpsEntries;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an object of operations")
            }
            fn visit_map<M: MapAccess<'de>>(self, mut map: M) -> std::result::Result<OpsEntries, M::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Value>()? {
                    out.push((k, v));
                }
                Ok(OpsEntries(out))
            }
        }
        deserializer.deserialize_map(EntriesVisitor)
    }
}

/// A decoded but unchecked algebra description.
#[derive(Debug, Deserialize)]
pub struct RawAlgebra {
    pub name: String,
    pub size: i64,
    #[serde(default)]
    pub elements: Option<Vec<String>>,
    #[serde(default)]
    pub ops: OpsEntries,
}

pub fn parse_raw(text: &str) -> Result<RawAlgebra> {
    Ok(serde_json::from_str(text)?)
}

/// Checks a raw description and builds the algebra. Operations are ordered
/// by name.
pub fn validate_algebra(raw: RawAlgebra) -> Result<FiniteAlgebra> {
    if raw.size <= 0 {
        return Err(Error::EmptyUniverse(raw.name));
    }
    let size = raw.size as usize;
    let mut entries = raw.ops.0;
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    for w in entries.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateOpName(w[0].0.clone()));
        }
    }
    let mut symbols = Vec::with_capacity(entries.len());
    let mut tables = Vec::with_capacity(entries.len());
    for (name, spec) in &entries {
        let obj = spec.as_object().ok_or_else(|| Error::ShapeMismatch {
            op: name.clone(),
            detail: "is not an object with `arity` and `table`".into(),
        })?;
        let arity = obj
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::ShapeMismatch {
                op: name.clone(),
                detail: "has no non-negative integer `arity`".into(),
            })? as usize;
        let table = obj.get("table").ok_or_else(|| Error::ShapeMismatch {
            op: name.clone(),
            detail: "has no `table`".into(),
        })?;
        let mut flat = Vec::new();
        let mut position = Vec::new();
        flatten(name, table, arity, size, &mut position, &mut flat)?;
        symbols.push((name.clone(), arity));
        tables.push(flat);
    }
    let sig = Signature::new(symbols)?;
    FiniteAlgebra::new(raw.name, sig, size, tables, raw.elements)
}

fn flatten(op: &str, v: &Value, depth: usize, size: usize, position: &mut Vec<usize>, out: &mut Vec<Elem>) -> Result<()> {
    if depth == 0 {
        let here = || format!("{position:?}");
        return match v {
            Value::Number(n) => {
                if let Some(u) = n.as_u64() {
                    if (u as usize) < size && u <= usize::MAX as u64 {
                        out.push(u as usize);
                        Ok(())
                    } else {
                        Err(Error::OutOfRangeEntry {
                            op: op.to_string(),
                            position: here(),
                            value: i64::try_from(u).unwrap_or(i64::MAX),
                            size,
                        })
                    }
                } else if let Some(i) = n.as_i64() {
                    Err(Error::OutOfRangeEntry {
                        op: op.to_string(),
                        position: here(),
                        value: i,
                        size,
                    })
                } else {
                    Err(Error::ShapeMismatch {
                        op: op.to_string(),
                        detail: format!("entry at {} is not an integer", here()),
                    })
                }
            }
            _ => Err(Error::ShapeMismatch {
                op: op.to_string(),
                detail: format!("expected an integer at {}, found {}", here(), kind(v)),
            }),
        };
    }
    let arr = v.as_array().ok_or_else(|| Error::ShapeMismatch {
        op: op.to_string(),
        detail: format!("expected an array at {position:?}, found {}", kind(v)),
    })?;
    if arr.len() != size {
        return Err(Error::ShapeMismatch {
            op: op.to_string(),
            detail: format!("array at {position:?} has length {}, expected {size}", arr.len()),
        });
    }
    for (i, item) in arr.iter().enumerate() {
        position.push(i);
        flatten(op, item, depth - 1, size, position, out)?;
        position.pop();
    }
    Ok(())
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    validate_algebra(parse_raw(text)?)
}

pub fn read_algebra(path: impl AsRef<Path>) -> Result<FiniteAlgebra> {
    parse_algebra(&fs::read_to_string(path)?)
}

/// The file form of an algebra.
pub fn algebra_to_json(alg: &FiniteAlgebra) -> Value {
    let mut ops = Map::new();
    for (i, sym) in alg.signature().symbols().iter().enumerate() {
        let table = nest(alg.ops()[i].table(), alg.size(), sym.arity);
        ops.insert(sym.name.clone(), json!({ "arity": sym.arity, "table": table }));
    }
    let mut obj = Map::new();
    if let Some(labels) = alg.labels() {
        obj.insert("elements".into(), json!(labels));
    }
    obj.insert("name".into(), json!(alg.name()));
    obj.insert("ops".into(), Value::Object(ops));
    obj.insert("size".into(), json!(alg.size()));
    Value::Object(obj)
}

fn nest(flat: &[Elem], size: usize, arity: usize) -> Value {
    if arity == 0 {
        return json!(flat[0]);
    }
    let stride = flat.len() / size;
    Value::Array((0..size).map(|i| nest(&flat[i * stride..(i + 1) * stride], size, arity - 1)).collect())
}

pub fn algebra_to_string(alg: &FiniteAlgebra) -> String {
    to_pretty(&algebra_to_json(alg))
}

pub fn write_algebra(path: impl AsRef<Path>, alg: &FiniteAlgebra) -> Result<()> {
    fs::write(path, algebra_to_string(alg))?;
    Ok(())
}

/// Deterministic pretty printing: sorted keys, two-space indent, arrays of
/// scalars kept on one line, trailing LF.
pub fn to_pretty(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&item.to_string());
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String((*k).clone()));
                write_value(out, &map[*k], indent + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
