//! CSV and JSON emission of simulation results.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::construction::CodeDescriptor;
use crate::error::{Error, Result};

use super::experiment::{DecoderSpec, SimResult, StopRule};

pub const CSV_COLUMNS: [&str; 8] = [
    "decoder",
    "ebn0_db",
    "frames",
    "frame_errors",
    "fer",
    "avg_iterations",
    "avg_steps",
    "wall_time_s",
];

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("format `{other}` (expected csv or json)"))),
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

/// Configuration that produced a set of results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code: CodeDescriptor,
    pub seed: u64,
    pub decoders: Vec<DecoderSpec>,
    pub stop: StopRule,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub results: Vec<SimResult>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    decoder: &'a str,
    ebn0_db: f64,
    frames: u64,
    frame_errors: u64,
    fer: f64,
    avg_iterations: f64,
    avg_steps: f64,
    wall_time_s: f64,
}

/// One header line plus one row per result.
pub fn write_csv<W: Write>(out: W, results: &[SimResult]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in results {
        w.serialize(CsvRow {
            decoder: &r.decoder,
            ebn0_db: r.ebn0_db,
            frames: r.frames,
            frame_errors: r.frame_errors,
            fer: r.fer,
            avg_iterations: r.avg_iterations,
            avg_steps: r.avg_steps,
            wall_time_s: r.wall_time_s,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, report: &Report) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<Report> {
    Ok(serde_json::from_str(text)?)
}

pub fn emit_results<W: Write>(out: W, report: &Report, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, &report.results),
        Format::Json => write_json(out, report),
    }
}
