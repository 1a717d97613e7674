//! Tabular command output and its CSV/JSON renderings.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Nine significant digits in exponent form with a signed exponent;
/// non-finite values spelled out.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // signed exponent, as JSON serializers print it
        let s = format!("{v:.8e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => {
                Value::Number(Number::from_str(&format_number(*v)).expect("valid number"))
            }
            other => Value::String(other.render()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let i = self.column(name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Num(v) => *v,
                Cell::Text(s) => s.parse().unwrap_or(f64::NAN),
            })
            .collect()
    }

    /// CSV with a leading `#` metadata line echoing `args`.
    pub fn to_csv(&self, args: &[String]) -> String {
        let mut out = format!(
            "# schema_version={} command={} args={}\n",
            self.schema_version,
            self.command,
            args.join(" ")
        );
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("utf-8 cells"));
        out
    }

    pub fn to_json(&self, args: &[String]) -> String {
        let mut obj = Map::new();
        obj.insert("schema_version".into(), Value::String(self.schema_version.clone()));
        obj.insert("command".into(), Value::String(self.command.clone()));
        obj.insert(
            "arguments".into(),
            Value::Array(args.iter().cloned().map(Value::String).collect()),
        );
        obj.insert(
            "parameters".into(),
            Value::Object(
                self.parameters
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect(),
            ),
        );
        obj.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        obj.insert(
            "rows".into(),
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                    .collect(),
            ),
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new("demo", &["x", "note"]);
        r.param("k", 3);
        r.push(vec![Cell::Num(0.1), "a,b".into()]);
        r.push(vec![Cell::Num(-2.5e-12), "".into()]);
        r.push(vec![Cell::Num(f64::INFINITY), "z".into()]);
        r
    }

    #[test]
    fn positive_exponents_agree_across_formats() {
        let mut r = OutputRecord::new("demo", &["x"]);
        r.push(vec![Cell::Num(2.0)]);
        r.push(vec![Cell::Num(12345.0)]);
        let csv = r.to_csv(&[]);
        let j: Value = serde_json::from_str(&r.to_json(&[])).unwrap();
        let rows = j["rows"].as_array().unwrap();
        for (line, row) in csv.lines().skip(2).zip(rows) {
            assert_eq!(line, row[0].to_string());
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_number(0.1), "1.00000000e-1");
        assert_eq!(format_number(1234.5678901), "1.23456789e+3");
        assert_eq!(format_number(0.0), "0.00000000e+0");
        assert_eq!(format_number(-0.5), "-5.00000000e-1");
    }

    #[test]
    fn csv_layout() {
        let s = sample().to_csv(&["demo".into(), "--k".into(), "3".into()]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# schema_version=1 command=demo args=demo --k 3");
        assert_eq!(lines[1], "x,note");
        assert_eq!(lines[2], "1.00000000e-1,\"a,b\"");
        assert_eq!(lines[3], "-2.50000000e-12,");
        assert_eq!(lines[4], "inf,z");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn json_numbers_match_csv_text() {
        let r = sample();
        let j: Value = serde_json::from_str(&r.to_json(&[])).unwrap();
        let rows = j["rows"].as_array().unwrap();
        assert_eq!(rows[0][0].to_string(), "1.00000000e-1");
        assert_eq!(rows[1][0].to_string(), "-2.50000000e-12");
        assert_eq!(rows[2][0], Value::String("inf".into()));
        assert_eq!(j["parameters"]["k"], Value::String("3".into()));
    }
}
