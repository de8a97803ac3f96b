//! Tables, headers and writers.
//!
//! CSV numbers use 17 significant digits in lowercase scientific notation so
//! they round-trip exactly. Headers are `#` comment lines carrying the
//! artifact version, the subcommand and the resolved config; a timestamp is
//! added only on request.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde_json::{json, Map, Value};

use crate::config::{Format, OutputOptions};

pub const ARTIFACT: &str = "nh-diode";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// `{:.16e}`: 17 significant digits, e.g. `2.0943951023931953e0`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Distinguishes tables of one run (`left`, `right`); empty for one table.
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            label: String::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Outcome classes with their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A scan found nothing.
    NoHits,
    /// An applicable identity residual exceeded its threshold.
    IdentityBreach,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NoHits => 1,
            Status::IdentityBreach => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NoHits => "no-hits",
            Status::IdentityBreach => "identity-breach",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
    pub status: Status,
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn header(report: &Report, stamp: Option<u64>) -> Map<String, Value> {
    let mut h = Map::new();
    h.insert("artifact".into(), json!(ARTIFACT));
    h.insert("version".into(), json!(VERSION));
    h.insert("command".into(), json!(report.command));
    h.insert("config".into(), report.config.clone());
    if let Some(t) = stamp {
        h.insert("generated_unix".into(), json!(t));
    }
    h
}

pub fn render_csv(report: &Report, table: &Table, stamp: Option<u64>) -> String {
    let mut s = String::new();
    s.push_str(&format!("# artifact: {ARTIFACT} {VERSION}\n"));
    s.push_str(&format!("# command: {}\n", report.command));
    s.push_str(&format!("# config: {}\n", report.config));
    if let Some(t) = stamp {
        s.push_str(&format!("# generated_unix: {t}\n"));
    }
    if !table.label.is_empty() {
        s.push_str(&format!("# table: {}\n", table.label));
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn render_json(report: &Report, table: &Table, stamp: Option<u64>) -> String {
    let mut doc = header(report, stamp);
    if !table.label.is_empty() {
        doc.insert("table".into(), json!(table.label));
    }
    doc.insert("columns".into(), json!(table.columns));
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    doc.insert("rows".into(), Value::Array(rows));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

pub fn render_summary(report: &Report, stamp: Option<u64>) -> String {
    let mut doc = header(report, stamp);
    doc.insert("status".into(), json!(report.status.name()));
    doc.insert("exit_code".into(), json!(report.status.code()));
    for (k, v) in &report.summary {
        doc.insert(k.clone(), v.clone());
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

/// `out.csv` with label `left` becomes `out_left.csv`.
pub fn labelled_path(path: &Path, label: &str) -> PathBuf {
    if label.is_empty() {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{label}.{ext}"),
        None => format!("{stem}_{label}"),
    };
    path.with_file_name(name)
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Writes the data tables (file or stdout) and the summary (file or stderr).
pub fn write_report(report: &Report, opts: &OutputOptions) -> anyhow::Result<()> {
    let stamp = opts.stamp.then(timestamp);
    let single = report.tables.len() == 1;
    let mut stdout = io::stdout().lock();
    for table in &report.tables {
        let text = match opts.format {
            Format::Csv => render_csv(report, table, stamp),
            Format::Json => render_json(report, table, stamp),
        };
        match &opts.output {
            Some(p) if single => write_file(p, &text)?,
            Some(p) => write_file(&labelled_path(p, &table.label), &text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
    }
    stdout.flush()?;
    let summary = render_summary(report, stamp);
    match &opts.summary {
        Some(p) => write_file(p, &summary)?,
        None => io::stderr().lock().write_all(summary.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new(&["k", "n", "tag"]);
        t.push(vec![
            Cell::Num(2.0 * std::f64::consts::PI / 3.0),
            Cell::Int(3),
            "x".into(),
        ]);
        t.push(vec![Cell::Num(-1e-300), Cell::Int(-1), "y".into()]);
        Report {
            command: "test",
            config: json!({"gamma": 1.5}),
            tables: vec![t],
            summary: Map::new(),
            status: Status::Ok,
        }
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 2.0 / 3.0, -1e-300, 123456789.123, f64::MIN_POSITIVE, 1.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(!s.contains('E'));
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let r = sample();
        let s = render_csv(&r, &r.tables[0], None);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# artifact: nh-diode {VERSION}"));
        assert_eq!(lines[1], "# command: test");
        assert_eq!(lines[2], r#"# config: {"gamma":1.5}"#);
        assert_eq!(lines[3], "k,n,tag");
        assert_eq!(lines[4], "2.0943951023931953e0,3,x");
        assert!(!s.contains("generated"));
        assert!(render_csv(&r, &r.tables[0], Some(5)).contains("# generated_unix: 5"));
    }

    #[test]
    fn json_layout() {
        let r = sample();
        let v: Value = serde_json::from_str(&render_json(&r, &r.tables[0], None)).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["gamma"], 1.5);
        assert_eq!(v["rows"][0][1], 3);
        let s: Value = serde_json::from_str(&render_summary(&r, None)).unwrap();
        assert_eq!(s["exit_code"], 0);
    }

    #[test]
    fn labelled_paths() {
        assert_eq!(
            labelled_path(Path::new("a/out.csv"), "left"),
            Path::new("a/out_left.csv")
        );
        assert_eq!(labelled_path(Path::new("out"), "right"), Path::new("out_right"));
        assert_eq!(labelled_path(Path::new("out.csv"), ""), Path::new("out.csv"));
    }
}
