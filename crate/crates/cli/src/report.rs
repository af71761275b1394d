//! Tabular reports and their CSV / JSON renderings.
//!
//! CSV: one header row, then data rows, then `# key = value` summary lines.
//! Numbers use Rust's shortest round-trip scientific notation, so parsing a
//! cell gives back the exact `f64`. Absent values are empty cells.
//!
//! JSON: a single object `{meta, columns, rows, summary}`; absent values and
//! non-finite numbers are `null`.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Text(s) => json!(s),
            _ => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A failed grid point, listed in diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub context: String,
    pub at: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Ordered labeled results; numbers render like cells.
    pub summary: Vec<(String, Cell)>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn fail(&mut self, context: impl Into<String>, at: f64, reason: impl Into<String>) {
        self.failures.push(Failure {
            context: context.into(),
            at,
            reason: reason.into(),
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k} = {}\n", v.csv()));
        }
        out
    }

    pub fn to_json(&self, meta: Value) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), v.json());
        }
        let doc = json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
            "summary": summary,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format, meta: Value) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(meta),
        }
    }

    /// Plain-text list of failed points, one per line.
    pub fn diagnostics(&self, error: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(e) = error {
            out.push_str(&format!("error: {e}\n"));
        }
        out.push_str(&format!("failed points: {}\n", self.failures.len()));
        for f in &self.failures {
            out.push_str(&format!("{}\t{:e}\t{}\n", f.context, f.at, f.reason));
        }
        out
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
