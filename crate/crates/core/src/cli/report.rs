//! Deterministic reports: text tables or a single JSON document.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Formats with 12 significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

/// A JSON number rounded to 12 significant digits.
pub fn num(x: f64) -> Value {
    let s = sig12(x);
    match s.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(s),
    }
}

pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub fields: Vec<(String, Value)>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub seed: u64,
    pub tol: f64,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub notes: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String, seed: u64, tol: f64) -> Report {
        Report { command: command.into(), inputs_digest, seed, tol, tables: Vec::new(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn table(&mut self, title: &str, columns: &[&str], rows: Vec<Vec<Value>>) {
        self.tables.push(Table { title: title.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows });
    }

    pub fn check(&mut self, name: &str, pass: bool, fields: Vec<(&str, Value)>) {
        self.checks.push(Check { name: name.into(), pass, fields: fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect() });
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.notes.push((key.into(), value));
    }

    pub fn to_json(&self) -> Value {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
                    .collect();
                json!({"title": t.title, "rows": rows})
            })
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(c.name.clone()));
                m.insert("pass".into(), Value::Bool(c.pass));
                for (k, v) in &c.fields {
                    m.insert(k.clone(), v.clone());
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "tol": num(self.tol),
            "notes": Value::Object(self.notes.iter().cloned().collect()),
            "tables": tables,
            "checks": checks,
            "pass": self.pass(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("inputs:  sha256:{}\n", self.inputs_digest));
        out.push_str(&format!("seed: {}  tol: {}\n", self.seed, sig12(self.tol)));
        for (k, v) in &self.notes {
            out.push_str(&format!("{k}: {}\n", cell(v)));
        }
        for t in &self.tables {
            out.push_str(&format!("\n{}\n", t.title));
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
            let mut width: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for r in &cells {
                for (i, c) in r.iter().enumerate() {
                    width[i] = width[i].max(c.chars().count());
                }
            }
            let line = |row: &[String]| -> String {
                let parts: Vec<String> =
                    row.iter().enumerate().map(|(i, c)| format!("{c}{}", " ".repeat(width[i] - c.chars().count()))).collect();
                format!("  {}\n", parts.join("  ").trim_end())
            };
            out.push_str(&line(&t.columns));
            for r in &cells {
                out.push_str(&line(r));
            }
        }
        if !self.checks.is_empty() {
            out.push('\n');
        }
        for c in &self.checks {
            let fields: Vec<String> = c.fields.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect();
            out.push_str(&format!("[{}] {}  {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, fields.join(" ")));
        }
        out.push_str(&format!("result: {}\n", if self.pass() { "PASS" } else { "FAIL" }));
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().filter(|_| !n.is_u64() && !n.is_i64()).map(sig12).unwrap_or_else(|| n.to_string()),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(1.618033988749895), "1.61803398875");
        assert_eq!(sig12(2.5), "2.5");
        assert_eq!(sig12(4.0), "4");
        assert_eq!(sig12(1.2345678901234e-12), "1.23456789012e-12");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(num(0.1 + 0.2), json!(0.3));
    }

    #[test]
    fn digest_separates_parts() {
        assert_ne!(digest(&[b"ab", b"c"]), digest(&[b"a", b"bc"]));
        assert_eq!(digest(&[b"x"]).len(), 64);
    }
}
