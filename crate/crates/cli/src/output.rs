use std::io::Write;

use serde_json::{json, Map, Value};

use crate::args::Format;

/// Column-major description plus row-major data; every cell is a JSON scalar.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Non-finite floats have no JSON representation; they become `null`.
pub fn num(x: f64) -> Value {
    Value::from(x)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub struct Report {
    pub config: Map<String, Value>,
    pub table: Table,
    pub seed: u64,
}

impl Report {
    fn provenance(&self) -> Value {
        json!({
            "library": "exstat",
            "version": exstat::VERSION,
            "seed": self.seed,
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => self.write_json(out),
            Format::Csv => self.write_csv(out),
        }
    }

    fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let results: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|row| Value::Object(self.table.columns.iter().cloned().zip(row.iter().cloned()).collect()))
            .collect();
        let doc = json!({
            "config": self.config,
            "results": results,
            "provenance": self.provenance(),
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.config {
            writeln!(out, "# config.{k}={}", cell(v))?;
        }
        if let Value::Object(p) = self.provenance() {
            for (k, v) in &p {
                writeln!(out, "# provenance.{k}={}", cell(v))?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.flush()
    }
}

/// Numbers use serde_json's shortest round-trip form, so CSV and JSON agree
/// digit for digit.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> Report {
        let mut table = Table::new(["a_h", "label"]);
        table.push(vec![num(0.1), Value::from("x,\"y\"")]);
        table.push(vec![num(f64::NAN), Value::from("plain")]);
        let mut config = Map::new();
        config.insert("n".into(), Value::from(3));
        Report { config, table, seed: 7 }
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let mut buf = Vec::new();
        report().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# config.n=3\n# provenance.library=exstat\n"));
        assert!(text.ends_with("a_h,label\n0.1,\"x,\"\"y\"\"\"\n,plain\n"));
    }

    #[test]
    fn json_has_three_sections() {
        let mut buf = Vec::new();
        report().write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["results"][0]["a_h"], 0.1);
        assert!(v["results"][1]["a_h"].is_null());
        assert_eq!(v["provenance"]["seed"], 7);
    }
}
