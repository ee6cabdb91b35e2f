use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::experiment::Experiment;
use super::run::{SweepResult, SweepRow};
use super::tables::{ContourRow, SensitivityResult, SensitivityRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown output format `{s}` (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

fn ser_err(e: impl fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

/// Header row plus one record per row. Floats use shortest round-trip form.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(ser_err)?;
    }
    w.into_inner().map_err(ser_err)
}

pub fn from_csv<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(ser_err)
}

#[derive(Serialize)]
struct Document<'a, T> {
    experiments: Vec<&'a Experiment>,
    rows: Vec<&'a T>,
}

fn to_json<T: Serialize>(experiments: Vec<&Experiment>, rows: Vec<&T>) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&Document { experiments, rows }).map_err(ser_err)?;
    out.push(b'\n');
    Ok(out)
}

pub fn emit_sweeps(results: &[SweepResult], format: Format) -> Result<Vec<u8>> {
    let rows: Vec<&SweepRow> = results.iter().flat_map(|r| &r.rows).collect();
    match format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(results.iter().map(|r| &r.experiment).collect(), rows),
    }
}

pub fn emit_sensitivity(results: &[SensitivityResult], format: Format) -> Result<Vec<u8>> {
    let rows: Vec<&SensitivityRow> = results.iter().flat_map(|r| &r.rows).collect();
    match format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(results.iter().map(|r| &r.experiment).collect(), rows),
    }
}

pub fn emit_contours(experiment: &Experiment, rows: &[ContourRow], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(vec![experiment], rows.iter().collect()),
    }
}

/// Plain record list: CSV, or a JSON array without experiment metadata.
pub fn emit_records<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows).map_err(ser_err)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Write to `path`, or to stdout when `None`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(bytes).and_then(|_| out.flush()) {
                // downstream closed early (e.g. `| head`)
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| Error::io("<stdout>", e)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::tables::{cumulant_table, CumulantRow};

    #[test]
    fn csv_round_trip() {
        let rows = cumulant_table();
        let bytes = to_csv(&rows).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("modulation,c42,c63,fc\n"), "{text}");
        let back: Vec<CumulantRow> = from_csv(&bytes).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn json_records_are_an_array() {
        let text = String::from_utf8(emit_records(&cumulant_table(), Format::Json).unwrap()).unwrap();
        assert!(text.starts_with('['));
        assert!(text.contains("\"modulation\": \"QAM16\""));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn io_errors_carry_path() {
        let err = write_output(Some(Path::new("/nonexistent/dir/out.csv")), b"x").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }
}
