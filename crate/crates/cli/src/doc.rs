//! Output documents: a small JSON/CSV writer with deterministic bytes.
//!
//! Every numeric field is printed with 12 significant digits; infinities
//! serialize as the strings `"inf"`/`"-inf"` in JSON and as `INF`/`-INF` in
//! CSV. Hand-rolled so the byte output is stable and under our control.

use divsmooth_core::ExtReal;
use std::fmt::Write as _;

/// Format a finite float with 12 significant digits.
pub fn fmt_sig(v: f64) -> String {
    debug_assert!(v.is_finite());
    format!("{v:.11e}")
}

/// CSV rendering: 12 significant digits, infinities as `INF`/`-INF`.
pub fn fmt_csv_num(v: f64) -> String {
    if v == f64::INFINITY {
        "INF".into()
    } else if v == f64::NEG_INFINITY {
        "-INF".into()
    } else {
        fmt_sig(v)
    }
}

/// A JSON value restricted to what the documents need.
#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Ext(ExtReal),
    Int(i64),
    Str(String),
    Bool(bool),
    Arr(Vec<Value>),
    Obj(Document),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<ExtReal> for Value {
    fn from(v: ExtReal) -> Self {
        Value::Ext(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl Value {
    pub fn floats(vs: &[f64]) -> Value {
        Value::Arr(vs.iter().map(|&v| Value::Num(v)).collect())
    }
}

/// An ordered JSON object.
#[derive(Debug, Clone, Default)]
pub struct Document {
    fields: Vec<(String, Value)>,
}

impl Document {
    /// A fresh document carrying the schema tag and the command name.
    pub fn new(command: &str) -> Self {
        let mut doc = Document::default();
        doc.push("schema", "divsmooth/1");
        doc.push("command", command);
        doc
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn write_json(&self, out: &mut String) {
        out.push('{');
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_json_string(out, k);
            out.push(':');
            write_value(out, v);
        }
        out.push('}');
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        self.write_json(&mut out);
        out.push('\n');
        out
    }

    /// Flat CSV rendering: a header of scalar field paths and one value row.
    /// Arrays are joined with `;`, nested objects flattened with `.`.
    pub fn to_csv(&self) -> String {
        let mut header = Vec::new();
        let mut row = Vec::new();
        flatten_csv("", self, &mut header, &mut row);
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Num(x) => {
            if x.is_finite() {
                out.push_str(&fmt_sig(*x));
            } else {
                write_json_string(out, if *x > 0.0 { "inf" } else { "-inf" });
            }
        }
        Value::Ext(x) => match x {
            ExtReal::Finite(f) => out.push_str(&fmt_sig(*f)),
            ExtReal::PosInf => write_json_string(out, "inf"),
            ExtReal::NegInf => write_json_string(out, "-inf"),
        },
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Str(s) => write_json_string(out, s),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Arr(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Obj(doc) => doc.write_json(out),
    }
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::Num(x) => fmt_csv_num(*x),
        Value::Ext(x) => fmt_csv_num(x.to_f64()),
        Value::Int(i) => i.to_string(),
        Value::Str(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Arr(items) => items.iter().map(csv_scalar).collect::<Vec<_>>().join(";"),
        // objects inside arrays cannot be flattened into their own columns;
        // render them inline as key=value pairs
        Value::Obj(doc) => doc
            .fields
            .iter()
            .map(|(k, v)| format!("{k}={}", csv_scalar(v)))
            .collect::<Vec<_>>()
            .join("|"),
    }
}

fn flatten_csv(prefix: &str, doc: &Document, header: &mut Vec<String>, row: &mut Vec<String>) {
    for (k, v) in &doc.fields {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Obj(inner) => flatten_csv(&path, inner, header, row),
            other => {
                header.push(path);
                row.push(csv_scalar(other));
            }
        }
    }
}

impl Document {
    /// An object without the schema preamble, for nesting.
    pub fn new_inner() -> Self {
        Document::default()
    }
}

/// Parse a JSON number-or-string field that may carry `"inf"`/`"-inf"`.
pub fn json_extended(v: &serde_json::Value) -> Option<f64> {
    if let Some(x) = v.as_f64() {
        return Some(x);
    }
    match v.as_str()? {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        s => s.parse().ok(),
    }
}
