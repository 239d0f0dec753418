//! Tabular scan output: metadata, an optional report block and rows of
//! named cells, written as CSV or JSON.
//!
//! CSV layout: `# key = json-value` lines for the metadata, `# report.key
//! = json-value` lines for the report, then a header row and data rows.
//! Reals are written with 17 significant digits so files are bit-stable.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Real(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn parse(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(x) = s.parse::<f64>() {
            Cell::Real(x)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Real(x) if x.is_finite() => write!(f, "{:.16e}", x + 0.0),
            Cell::Real(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub type Row = IndexMap<String, Cell>;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanResult {
    pub metadata: IndexMap<String, Value>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub report: IndexMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScanIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed scan file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl ScanResult {
    pub fn new<I, S>(columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScanResult {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Appends a row; cells must be given in column order.
    pub fn push<I: IntoIterator<Item = Cell>>(&mut self, cells: I) {
        let row: Row = self.columns.iter().cloned().zip(cells).collect();
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    /// Values of a numeric column, in row order.
    pub fn column(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.get(name).and_then(Cell::as_f64))
            .collect()
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> Result<(), ScanIoError> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), ScanIoError> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k} = {}", serde_json::to_string(v)?)?;
        }
        for (k, v) in &self.report {
            writeln!(w, "# report.{k} = {}", serde_json::to_string(v)?)?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(self.columns.iter().map(|c| row[c].to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), ScanIoError> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self, ScanIoError> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, ScanIoError> {
        let mut reader = BufReader::new(r);
        let mut result = ScanResult::default();
        let mut body = String::new();
        let mut line = String::new();
        while reader.read_line(&mut line)? > 0 {
            if let Some(comment) = line.strip_prefix("# ") {
                let (k, v) = comment
                    .trim_end()
                    .split_once(" = ")
                    .ok_or_else(|| ScanIoError::Format(format!("bad metadata line {line:?}")))?;
                let v: Value = serde_json::from_str(v)?;
                match k.strip_prefix("report.") {
                    Some(rk) => result.report.insert(rk.to_string(), v),
                    None => result.metadata.insert(k.to_string(), v),
                };
            } else {
                body.push_str(&line);
            }
            line.clear();
        }
        let mut csv = csv::Reader::from_reader(body.as_bytes());
        result.columns = csv.headers()?.iter().map(String::from).collect();
        for record in csv.records() {
            let record = record?;
            result.rows.push(
                result
                    .columns
                    .iter()
                    .cloned()
                    .zip(record.iter().map(Cell::parse))
                    .collect(),
            );
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScanResult {
        let mut s = ScanResult::new(["h", "r", "chsh_max", "label"]);
        s.metadata.insert("command".into(), Value::from("chsh-scan"));
        s.metadata.insert("gamma".into(), Value::from(0.5));
        s.report.insert("gap".into(), Value::from(0.125));
        s.push([Cell::Real(0.1), Cell::Int(1), Cell::Real(1.0 / 3.0), "a,b".into()]);
        s.push([Cell::Real(2.0), Cell::Int(3), Cell::Real(std::f64::consts::PI), "plain".into()]);
        s
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("3.3333333333333331e-1"));
        assert!(text.contains("\"a,b\""));
        let back = ScanResult::read_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let s = sample();
        let mut buf = Vec::new();
        s.write_json(&mut buf).unwrap();
        assert_eq!(ScanResult::read_json(&buf[..]).unwrap(), s);
    }

    #[test]
    fn numeric_columns() {
        assert_eq!(sample().column("r"), vec![1.0, 3.0]);
        assert!(sample().column("label").is_empty());
    }
}
