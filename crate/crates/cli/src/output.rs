use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::Format;

/// Provenance block embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub artifact_version: String,
    pub seed: Option<u64>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new<P: Serialize>(command: &str, params: &P, seed: Option<u64>) -> Self {
        let parameters = match serde_json::to_value(params) {
            Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
            _ => BTreeMap::new(),
        };
        RunManifest {
            command: command.to_string(),
            parameters,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp: timestamp(),
        }
    }

    fn header_lines(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command: {}", self.command);
        for (k, v) in &self.parameters {
            let v = match v {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "# param.{k}: {v}");
        }
        let _ = writeln!(s, "# artifact_version: {}", self.artifact_version);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed: {seed}");
        }
        let _ = writeln!(s, "# timestamp: {}", self.timestamp);
        s
    }
}

/// RFC 3339 time of the run, or of `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

fn non_finite(v: f64) -> Option<&'static str> {
    if v.is_nan() {
        Some("NaN")
    } else if v == f64::INFINITY {
        Some("inf")
    } else if v == f64::NEG_INFINITY {
        Some("-inf")
    } else {
        None
    }
}

impl Cell {
    /// Exact, round-trippable text.
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => non_finite(*v).map_or_else(|| v.to_string(), str::to_string),
            Cell::Int(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    /// Seven significant digits.
    fn pretty(&self) -> String {
        match self {
            Cell::Num(v) => {
                if let Some(s) = non_finite(*v) {
                    return s.to_string();
                }
                let a = v.abs();
                if a == 0.0 {
                    "0".to_string()
                } else if (1e-4..1e6).contains(&a) {
                    let decimals = (6 - a.log10().floor() as i32).clamp(0, 12) as usize;
                    format!("{v:.decimals$}")
                } else {
                    format!("{v:.6e}")
                }
            }
            other => other.csv(),
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(self, Cell::Num(_) | Cell::Int(_))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A command's result: a manifest, a flat table for text formats and a
/// structured payload for JSON.
pub struct Output {
    pub manifest: RunManifest,
    pub table: Table,
    pub payload: Map<String, Value>,
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut obj = Map::new();
                obj.insert(
                    "manifest".into(),
                    serde_json::to_value(&self.manifest).map_err(|e| e.to_string())?,
                );
                obj.extend(self.payload.clone());
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.columns).map_err(|e| e.to_string())?;
                for row in &self.table.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(|e| e.to_string())?;
                }
                let body = String::from_utf8(w.into_inner().map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                Ok(self.manifest.header_lines() + &body)
            }
            Format::Table => Ok(self.manifest.header_lines() + &self.pretty_table()),
        }
    }

    fn pretty_table(&self) -> String {
        let t = &self.table;
        let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::pretty).collect()).collect();
        let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut s = String::new();
        let header: Vec<String> = t.columns.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(s, "{}", header.join("  ").trim_end());
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        let _ = writeln!(s, "{}", rule.join("  "));
        for (row, raw) in cells.iter().zip(&t.rows) {
            let line: Vec<String> = row
                .iter()
                .zip(raw)
                .zip(&widths)
                .map(|((c, r), w)| if r.is_numeric() { format!("{c:>w$}") } else { format!("{c:<w$}") })
                .collect();
            let _ = writeln!(s, "{}", line.join("  ").trim_end());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(Cell::Num(0.0025789285699009974).pretty(), "0.002578929");
        assert_eq!(Cell::Num(0.025).pretty(), "0.02500000");
        assert_eq!(Cell::Num(1.5e-7).pretty(), "1.500000e-7");
        assert_eq!(Cell::Num(f64::INFINITY).csv(), "inf");
        assert_eq!(Cell::Num(0.1).csv(), "0.1");
    }
}
