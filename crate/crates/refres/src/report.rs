//! Rendering of certificates and tables as JSON, CSV or text.

use std::io::{self, Write};

use num_rational::BigRational;
use refres_core::resources::{Amount, RelationCertificate, ResourceVector, Status};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cli::Format;

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form of `sig12(x)`, in exponent notation for very small or large
/// magnitudes.
pub fn fmt_float(x: f64) -> String {
    let r = sig12(x);
    if r != 0.0 && r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(sig12(x)).map_or(Value::Null, Value::Number)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Float(x) => number(*x),
            Cell::Text(s) => json!(s),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn emit_table(table: &Table, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        table.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect();
            write_json(&json!({ "rows": rows }), out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::text))?;
            }
            w.flush()
        }
        Format::Text => {
            let cells: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
            let widths: Vec<usize> = table
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |items: Vec<&str>| {
                let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                padded.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(table.columns.clone()))?;
            for row in &cells {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CertificateJson {
    relation_id: String,
    lhs: Map<String, Value>,
    rhs: Map<String, Value>,
    status: &'static str,
    metrics: Map<String, Value>,
    tolerance: f64,
    seed: u64,
    trials: u64,
}

fn status_name(status: Status) -> &'static str {
    match status {
        Status::Verified => "verified",
        Status::Failed => "failed",
    }
}

fn amount_json(a: &Amount) -> Value {
    match a.exact() {
        Some(r) => json!({ "value": number(a.to_f64()), "exact": ratio_string(r) }),
        None => json!({ "value": number(a.to_f64()) }),
    }
}

fn vector_json(v: &ResourceVector) -> Map<String, Value> {
    v.iter().map(|(k, a)| (k.name().to_string(), amount_json(a))).collect()
}

fn certificate_json(cert: &RelationCertificate) -> CertificateJson {
    CertificateJson {
        relation_id: cert.relation_id.clone(),
        lhs: vector_json(&cert.lhs),
        rhs: vector_json(&cert.rhs),
        status: status_name(cert.status),
        metrics: cert.metrics.iter().map(|(k, v)| (k.clone(), number(*v))).collect(),
        tolerance: cert.tolerance,
        seed: cert.seed,
        trials: cert.trials,
    }
}

fn vector_text(v: &ResourceVector) -> String {
    let terms: Vec<String> = v.iter().map(|(k, a)| format!("{} {}", amount_text(a), k)).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn amount_text(a: &Amount) -> String {
    match a.exact() {
        Some(r) if r.is_integer() => r.numer().to_string(),
        Some(r) => ratio_string(r),
        None => fmt_float(a.to_f64()),
    }
}

/// Certificates in the given order. A single certificate is a JSON object,
/// several are a JSON array.
pub fn emit_certificates(certs: &[RelationCertificate], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            let reports: Vec<CertificateJson> = certs.iter().map(certificate_json).collect();
            let value = match reports.as_slice() {
                [one] => serde_json::to_value(one),
                _ => serde_json::to_value(&reports),
            }
            .map_err(io::Error::other)?;
            write_json(&value, out)
        }
        Format::Csv => {
            let mut table = Table::new(&["relation_id", "status", "metric", "value"]);
            for cert in certs {
                for (name, v) in &cert.metrics {
                    table.push(vec![
                        Cell::Text(cert.relation_id.clone()),
                        Cell::Text(status_name(cert.status).into()),
                        Cell::Text(name.clone()),
                        Cell::Float(*v),
                    ]);
                }
            }
            emit_table(&table, format, out)
        }
        Format::Text => {
            for cert in certs {
                writeln!(out, "{} {}", cert.relation_id, status_name(cert.status))?;
                writeln!(out, "  {} >= {}", vector_text(&cert.lhs), vector_text(&cert.rhs))?;
                writeln!(out, "  tolerance {} seed {} trials {}", fmt_float(cert.tolerance), cert.seed, cert.trials)?;
                for (name, v) in &cert.metrics {
                    writeln!(out, "  {name} = {}", fmt_float(*v))?;
                }
            }
            Ok(())
        }
    }
}

fn write_json(value: &Value, out: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::other)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(sig12(0.25).to_string(), "0.25");
        assert_eq!(sig12(3f64.log2()).to_string(), "1.58496250072");
        assert!(sig12(f64::NAN).is_nan());
        assert_eq!(fmt_float(1.7763568394e-15), "1.7763568394e-15");
        assert_eq!(fmt_float(1e-9), "1e-9");
    }

    #[test]
    fn empty_table_prints_header_only() {
        let table = Table::new(&["n_refbits", "p"]);
        let mut out = Vec::new();
        emit_table(&table, Format::Csv, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "n_refbits,p\n");
        let mut out = Vec::new();
        emit_table(&table, Format::Json, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "{\n  \"rows\": []\n}\n");
    }
}
