//! Run reports and their CSV/JSON encodings.
//!
//! CSV files start with one `#` comment line carrying the schema version,
//! crate version, generator and the resolved configuration as compact JSON,
//! followed by the subcommand's header and one row per record. JSON files
//! hold the whole [`RunReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    UInt(u64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::UInt(x) => write!(f, "{x}"),
            Cell::Float(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::UInt(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::UInt(x as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Outcome of one acceptance check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {} ({:.2} s)", self.id, self.name, self.detail, self.seconds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub version: String,
    pub generator: String,
    pub command: String,
    pub config: serde_json::Value,
    pub columns: Vec<String>,
    pub records: Vec<Vec<Cell>>,
    pub aggregates: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
}

impl RunReport {
    pub fn new(command: &str, config: &impl Serialize, columns: &[&str]) -> Self {
        RunReport {
            schema: SCHEMA,
            version: crate::VERSION.to_owned(),
            generator: crate::rng::GENERATOR.to_owned(),
            command: command.to_owned(),
            config: serde_json::to_value(config).expect("configs serialize"),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            records: Vec::new(),
            aggregates: BTreeMap::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn push(&mut self, record: Vec<Cell>) {
        debug_assert_eq!(record.len(), self.columns.len());
        self.records.push(record);
    }

    pub fn aggregate(&mut self, name: &str, value: f64) {
        self.aggregates.insert(name.to_owned(), value);
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// The `#` line that opens every CSV file.
    pub fn provenance(&self) -> String {
        format!(
            "# schema={} version={} generator={} command={} config={}",
            self.schema, self.version, self.generator, self.command, self.config
        )
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_owned(), source }
}

pub fn emit_report(report: &RunReport, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(report)
                .map_err(|source| Error::Json { path: path.to_owned(), source })?;
            fs::write(path, text + "\n").map_err(io_error(path))
        }
        Format::Csv => {
            let mut file = fs::File::create(path).map_err(io_error(path))?;
            writeln!(file, "{}", report.provenance()).map_err(io_error(path))?;
            let csv_error = |source| Error::Csv { path: path.to_owned(), source };
            let mut writer = csv::Writer::from_writer(file);
            writer.write_record(&report.columns).map_err(csv_error)?;
            for record in &report.records {
                writer.write_record(record.iter().map(Cell::to_string)).map_err(csv_error)?;
            }
            writer.flush().map_err(io_error(path))
        }
    }
}

pub fn read_json_report(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_owned(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new("rw-bench", &serde_json::json!({"n": 10, "seed": 3}), &["a", "b", "c"]);
        r.push(vec![1u64.into(), 0.25.into(), "done".into()]);
        r.push(vec![2u64.into(), 3.0.into(), "cap-exceeded".into()]);
        r.aggregate("mean", 1.5);
        r.verdicts.push(Verdict { id: 1, name: "x".into(), passed: true, detail: "ok".into(), seconds: 0.5 });
        r
    }

    #[test]
    fn header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let r = RunReport::new("rep", &serde_json::json!({}), &["x", "y"]);
        emit_report(&r, Format::Csv, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("# schema=1 "));
        assert_eq!(lines[1], "x,y");
    }

    #[test]
    fn csv_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit_report(&sample(), Format::Csv, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().skip(1).collect::<Vec<_>>(), ["a,b,c", "1,0.25,done", "2,3,cap-exceeded"]);
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("1.json"), dir.path().join("2.json"));
        emit_report(&sample(), Format::Json, &p1).unwrap();
        emit_report(&sample(), Format::Json, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(read_json_report(&p1).unwrap(), sample());
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = emit_report(&sample(), Format::Csv, Path::new("/nonexistent/dir/r.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
    }
}
