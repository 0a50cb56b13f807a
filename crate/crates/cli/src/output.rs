//! JSON envelopes and CSV tables. Every float is written with 17
//! significant digits, so printed values parse back to the same bits.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::CliError;

/// Seventeen significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number at 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let n: Number = fmt_f64(x).parse().expect("formatted float is valid JSON");
    Value::Number(n)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// `{command, params, seed, version, payload}`.
pub fn envelope(command: &str, params: Value, seed: Option<u64>, payload: Value) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), command.into());
    m.insert("params".into(), params);
    m.insert("seed".into(), seed.map_or(Value::Null, Value::from));
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("payload".into(), payload);
    Value::Object(m)
}

pub fn print_json(v: &Value) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Io(e.to_string()))
}

/// A CSV table of formatted cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut csv = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        csv.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            csv.write_record(row).map_err(io)?;
        }
        csv.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write_file(&self, path: &Path) -> Result<(), CliError> {
        let file = std::fs::File::create(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn print(&self) -> Result<(), CliError> {
        self.write_to(std::io::stdout().lock())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 5.3125, f64::MAX, f64::MIN_POSITIVE] {
            let text = fmt_f64(x);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let json = serde_json::to_string(&num(x)).unwrap();
            assert_eq!(json.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{json}");
        }
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn envelope_has_fixed_keys() {
        let v = envelope("tw", Value::Null, Some(3), Value::Null);
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["command", "params", "seed", "version", "payload"]);
    }
}
