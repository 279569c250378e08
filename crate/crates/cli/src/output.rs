//! Deterministic report rendering: canonical JSON (sorted keys, exact
//! "p/q" scalars), optional decimal annotations, and aligned tables.

use frechet_core::scalar::{rational_from_str, Scalar};
use serde_json::Value;

/// Canonical JSON: serde_json's map is a BTreeMap, so object keys come
/// out sorted; identical inputs give byte-identical output.
pub fn to_canonical_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serialization cannot fail")
}

/// Adds an "approx" decimal field to every Scalar-shaped object, for
/// human reading only; the exact fields stay authoritative.
pub fn annotate_floats(v: &mut Value) {
    match v {
        Value::Object(map) => {
            let is_scalar = map.len() == 2
                && map.get("re").map_or(false, Value::is_string)
                && map.get("im").map_or(false, Value::is_string);
            if is_scalar {
                let re = rational_from_str(map["re"].as_str().unwrap());
                let im = rational_from_str(map["im"].as_str().unwrap());
                if let (Ok(re), Ok(im)) = (re, im) {
                    let (r, i) = Scalar::new(re, im).to_f64_approx();
                    let approx = if i == 0.0 {
                        format!("{r}")
                    } else {
                        format!("{r}{}{}i", if i < 0.0 { "" } else { "+" }, i)
                    };
                    map.insert("approx".into(), Value::String(approx));
                }
                return;
            }
            for (_, child) in map.iter_mut() {
                annotate_floats(child);
            }
        }
        Value::Array(items) => {
            for child in items {
                annotate_floats(child);
            }
        }
        _ => {}
    }
}

/// Aligned key/value tables for terminal reading.
pub fn render_pretty(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, child) in map {
                if child.is_object() || (child.is_array() && !is_flat_array(child)) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(child, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k:<width$}  {}\n", flat(child)));
                }
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                if child.is_object() || (child.is_array() && !is_flat_array(child)) {
                    out.push_str(&format!("{pad}[{i}]\n"));
                    render(child, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}[{i}]  {}\n", flat(child)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", flat(other))),
    }
}

fn is_flat_array(v: &Value) -> bool {
    v.as_array()
        .map(|a| a.iter().all(|x| !x.is_object() && !x.is_array()))
        .unwrap_or(false)
}

fn flat(v: &Value) -> String {
    match v {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(flat).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
