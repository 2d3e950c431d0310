use std::fs;
use std::io::{self, Write};
use std::path::Path;

use loggamma::format::{format_real, real_to_json};
use loggamma::{Error, ExtendedReal, Result, VariationalResult};
use serde_json::{Map, Value};

use crate::args::Format;

/// One scalar cell of a record.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn ext(x: ExtendedReal<f64>) -> Self {
        Cell::Real(x.to_real())
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(x) => real_to_json(*x),
            Cell::Int(k) => Value::from(*k),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Result of one `compute` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub command: String,
    pub inputs: Vec<(&'static str, f64)>,
    /// A single entry is emitted as a bare value, several as an object.
    pub values: Vec<(&'static str, Cell)>,
    pub minimizers: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl Record {
    pub fn new(command: &str, inputs: Vec<(&'static str, f64)>, values: Vec<(&'static str, Cell)>) -> Self {
        Record { command: command.to_string(), inputs, values, minimizers: Vec::new(), residual: 0.0, iterations: 0 }
    }

    pub fn scalar(command: &str, inputs: Vec<(&'static str, f64)>, value: f64) -> Self {
        Self::new(command, inputs, vec![("value", Cell::Real(value))])
    }

    pub fn variational(command: &str, inputs: Vec<(&'static str, f64)>, res: &VariationalResult<f64>) -> Self {
        Record {
            minimizers: res.minimizers.clone(),
            residual: res.residual,
            iterations: res.iterations,
            ..Self::new(command, inputs, vec![("value", Cell::ext(res.value))])
        }
    }

    fn json(&self) -> Value {
        let inputs: Map<String, Value> = self.inputs.iter().map(|(k, v)| (k.to_string(), real_to_json(*v))).collect();
        let value = match self.values.as_slice() {
            [(_, single)] => single.json(),
            many => Value::Object(many.iter().map(|(k, c)| (k.to_string(), c.json())).collect()),
        };
        let mut map = Map::new();
        map.insert("command".into(), Value::from(self.command.clone()));
        map.insert("inputs".into(), Value::Object(inputs));
        map.insert("value".into(), value);
        map.insert("minimizers".into(), Value::Array(self.minimizers.iter().map(|&x| real_to_json(x)).collect()));
        map.insert("residual".into(), real_to_json(self.residual));
        map.insert("iterations".into(), Value::from(self.iterations));
        Value::Object(map)
    }

    fn row(&self) -> Vec<(String, String)> {
        let mut row: Vec<(String, String)> = self.inputs.iter().map(|(k, v)| (k.to_string(), format_real(*v))).collect();
        row.extend(self.values.iter().map(|(k, c)| (k.to_string(), c.text())));
        let mins: Vec<String> = self.minimizers.iter().map(|&x| format_real(x)).collect();
        row.push(("minimizers".into(), mins.join(";")));
        row.push(("residual".into(), format_real(self.residual)));
        row.push(("iterations".into(), self.iterations.to_string()));
        row
    }
}

/// Collects records and writes them as CSV (header row) or JSON lines.
pub struct Sink {
    format: Format,
    header: Option<Vec<String>>,
    text: String,
}

impl Sink {
    pub fn new(format: Format) -> Self {
        Sink { format, header: None, text: String::new() }
    }

    pub fn record(&mut self, rec: &Record) -> Result<()> {
        match self.format {
            Format::Json => self.json_line(&rec.json()),
            Format::Csv => self.csv_row(rec.row()),
        }
    }

    /// A flat row of named cells.
    pub fn flat(&mut self, cells: &[(&str, Cell)]) -> Result<()> {
        match self.format {
            Format::Json => {
                let map: Map<String, Value> = cells.iter().map(|(k, c)| (k.to_string(), c.json())).collect();
                self.json_line(&Value::Object(map))
            }
            Format::Csv => self.csv_row(cells.iter().map(|(k, c)| (k.to_string(), c.text())).collect()),
        }
    }

    pub fn json_line(&mut self, value: &Value) -> Result<()> {
        self.text.push_str(&serde_json::to_string(value).map_err(|e| Error::Usage(e.to_string()))?);
        self.text.push('\n');
        Ok(())
    }

    /// Raw text, already in the chosen format.
    pub fn raw(&mut self, text: &str) {
        self.text.push_str(text);
    }

    fn csv_row(&mut self, row: Vec<(String, String)>) -> Result<()> {
        let names: Vec<String> = row.iter().map(|(k, _)| k.clone()).collect();
        match &self.header {
            None => {
                self.text.push_str(&names.join(","));
                self.text.push('\n');
                self.header = Some(names);
            }
            Some(h) if *h != names => {
                return Err(Error::Usage(format!("CSV columns changed within one output: {h:?} vs {names:?}")));
            }
            Some(_) => {}
        }
        let cells: Vec<String> = row.into_iter().map(|(_, v)| v).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
        Ok(())
    }

    /// Writes to stdout and, when given, to `out`.
    pub fn finish(self, out: Option<&Path>) -> Result<()> {
        if let Some(path) = out {
            fs::write(path, &self.text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
        let mut stdout = io::stdout().lock();
        stdout
            .write_all(self.text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| Error::Usage(format!("cannot write to stdout: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_carry_the_same_digits() {
        let rec = Record::scalar("x", vec![("mu", 2.0)], 0.1);
        let mut csv = Sink::new(Format::Csv);
        csv.record(&rec).unwrap();
        let mut json = Sink::new(Format::Json);
        json.record(&rec).unwrap();
        assert_eq!(csv.text, "mu,value,minimizers,residual,iterations\n2.0000000000000000e+0,1.0000000000000001e-1,,0.0000000000000000e+0,0\n");
        assert!(json.text.contains("\"value\":1.0000000000000001e-1"));
        assert!(json.text.contains("\"mu\":2.0000000000000000e+0"));
    }

    #[test]
    fn infinity_is_a_string() {
        let rec = Record::new("x", vec![], vec![("value", Cell::Real(f64::INFINITY))]);
        let mut json = Sink::new(Format::Json);
        json.record(&rec).unwrap();
        assert!(json.text.contains("\"value\":\"inf\""));
    }

    #[test]
    fn csv_header_is_fixed() {
        let mut csv = Sink::new(Format::Csv);
        csv.flat(&[("a", Cell::Int(1))]).unwrap();
        assert!(csv.flat(&[("b", Cell::Int(1))]).is_err());
    }
}
