//! Reports: a JSON document with sorted keys and numbers rounded to nine
//! decimal places, plus a plain-text rendering of the same document.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

/// Decimal places kept in reported numbers.
pub const DECIMALS: i32 = 9;

pub struct Report {
    pub kind: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub provenance: Value,
}

impl Report {
    pub fn to_value(&self) -> Value {
        round_numbers(json!({
            "version": crate::input::VERSION,
            "kind": self.kind,
            "inputs": self.inputs,
            "results": self.results,
            "provenance": self.provenance,
        }))
    }
}

/// Serializes any library result into a JSON value.
pub fn to_json<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v)
        .map_err(|e| CliError::Computation(format!("cannot serialize result: {e}")))
}

pub fn round(x: f64) -> f64 {
    let scale = 10f64.powi(DECIMALS);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else if r.is_finite() {
        r
    } else {
        x
    }
}

pub fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_f64(round(x))
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_numbers(v))).collect())
        }
        other => other,
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `path = value` lines for every leaf, or a table for row-shaped results.
pub fn render_text(v: &Value) -> String {
    if let Some(rows) = v.pointer("/results/rows").and_then(Value::as_array) {
        return render_rows(rows, v.pointer("/results"));
    }
    let mut out = String::new();
    flatten("", v, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, v) in m {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&p, v, out);
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        leaf => {
            out.push_str(prefix);
            out.push_str(" = ");
            out.push_str(&leaf.to_string());
            out.push('\n');
        }
    }
}

fn render_rows(rows: &[Value], results: Option<&Value>) -> String {
    let text = |r: &Value, k: &str| match r.get(k) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Null) | None => "-".to_string(),
        Some(v) => v.to_string(),
    };
    let width = rows
        .iter()
        .map(|r| text(r, "name").len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut out = format!(
        "{:<width$}  {:>14}  {:>8}  {:>14}  {:>8}  result\n",
        "name", "value", "relation", "expected", "tol"
    );
    for r in rows {
        let verdict = if r.get("pass").and_then(Value::as_bool) == Some(true) {
            "PASS"
        } else {
            "FAIL"
        };
        out.push_str(&format!(
            "{:<width$}  {:>14}  {:>8}  {:>14}  {:>8}  {verdict}\n",
            text(r, "name"),
            text(r, "value"),
            text(r, "relation"),
            text(r, "expected"),
            text(r, "tolerance"),
        ));
    }
    if let Some(Value::Object(m)) = results {
        let summary: Map<String, Value> = m
            .iter()
            .filter(|(k, _)| k.as_str() != "rows")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        flatten("", &Value::Object(summary), &mut out);
    }
    out
}
