//! JSON reports written to stdout.

use covert_core::scalar::format_rational;
use covert_core::{Garbling, Rational};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 over the canonical bytes of each input, in order.
pub fn digest<'a>(inputs: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for s in inputs {
        h.update((s.len() as u64).to_le_bytes());
        h.update(s.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn r(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

pub fn rs(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(r).collect())
}

/// Nonzero kernel entries, `(x,y) -> (x',y')`.
pub fn garbling(g: &Garbling) -> Value {
    let (sy, ty) = (g.source_y.len(), g.target_y.len());
    let entries: Vec<Value> = g
        .rows()
        .iter()
        .enumerate()
        .flat_map(|(s, row)| {
            row.iter().enumerate().filter(|(_, w)| **w != Rational::from_integer(0.into())).map(move |(t, w)| {
                json!({
                    "from": [g.source_x[s / sy], g.source_y[s % sy]],
                    "to": [g.target_x[t / ty], g.target_y[t % ty]],
                    "weight": r(w),
                })
            })
        })
        .collect();
    Value::Array(entries)
}
