//! Canonical JSON emission: sorted keys, fixed 17-significant-digit float
//! formatting, complex numbers as `re+imi` strings. Identical runs produce
//! byte-identical reports.

use frobpencil_core::C64;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Value>),
    Map(BTreeMap<String, Value>),
}

impl Value {
    pub fn map() -> BTreeMap<String, Value> {
        BTreeMap::new()
    }

    pub fn complex(z: C64) -> Value {
        Value::Str(format_complex(z))
    }
}

/// 17 significant digits, negative zero normalized away.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{:.16e}", x)
}

pub fn format_complex(z: C64) -> String {
    let re = format_float(z.re);
    let im_abs = format_float(z.im.abs());
    let sign = if z.im < 0.0 { "-" } else { "+" };
    format!("{re}{sign}{im_abs}i")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Float(x) => {
            let _ = write!(out, "\"{}\"", format_float(*x));
        }
        Value::Str(s) => {
            let _ = write!(out, "\"{}\"", escape(s));
        }
        Value::List(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                let _ = write!(out, "{pad}  ");
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}]");
        }
        Value::Map(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, val)) in entries.iter().enumerate() {
                let _ = write!(out, "{pad}  \"{}\": ", escape(k));
                write_value(out, val, indent + 1);
                if i + 1 < entries.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}}}");
        }
    }
}

/// Render the report document with a trailing newline.
pub fn render(root: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, root, 0);
    out.push('\n');
    out
}
