//! Schema-stable JSON and plain CSV writers.
//!
//! JSON objects are emitted with sorted keys and every float in
//! `{:.16e}` form (17 significant digits), so two runs with the same
//! inputs produce identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Open `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, x);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, &map[k]);
            }
            out.push('}');
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::invalid(format!("serialise: {e}")))?;
    let mut s = String::new();
    write_value(&mut s, &v);
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    w.write_all(to_json(value)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// A CSV table of floats under a string header.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, w: &mut dyn Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        let to_io = |e: csv::Error| Error::Io(e.to_string());
        csv.write_record(&self.header).map_err(to_io)?;
        for r in &self.rows {
            csv.write_record(r).map_err(to_io)?;
        }
        csv.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed_width() {
        let s = to_json(&json!({"b": 0.1, "a": [1, 2.5], "c": null})).unwrap();
        assert_eq!(s, "{\"a\":[1,2.5000000000000000e0],\"b\":1.0000000000000001e-1,\"c\":null}\n");
    }

    #[test]
    fn float_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, -2.0 / 3.0] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(f64::NAN), "null");
    }
}
