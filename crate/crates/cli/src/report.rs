//! Run configuration and report envelopes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::format::write_json;

pub const REPORT_VERSION: u32 = 1;

/// Everything that determines a run's output. Thread count is deliberately
/// absent: it must not change any file.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    /// Every option the command resolved, defaults included.
    pub options: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

impl RunConfig {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        Self { subcommand: subcommand.into(), seed, ..Default::default() }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.options.insert(key.into(), v);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report<R: Serialize> {
    pub version: u32,
    pub command: String,
    pub config: RunConfig,
    /// Resolved formula constants, as printed before sampling.
    pub formulas: BTreeMap<String, Value>,
    pub result: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Collects formula values, echoing each to stdout as it is resolved.
#[derive(Debug, Default)]
pub struct Formulas {
    values: BTreeMap<String, Value>,
}

impl Formulas {
    pub fn show(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        println!("{key} = {v}");
        self.values.insert(key.into(), v);
    }

    pub fn into_map(self) -> BTreeMap<String, Value> {
        self.values
    }
}

/// Output sinks and the optional wall clock shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub json_out: Option<std::path::PathBuf>,
    pub csv_out: Option<std::path::PathBuf>,
    pub timing: bool,
    started: Instant,
}

impl Outputs {
    pub fn new(json_out: Option<std::path::PathBuf>, csv_out: Option<std::path::PathBuf>, timing: bool) -> Self {
        Self { json_out, csv_out, timing, started: Instant::now() }
    }

    pub fn elapsed(&self) -> Option<f64> {
        self.timing.then(|| self.started.elapsed().as_secs_f64())
    }

    pub fn finish<R: Serialize>(
        &self,
        config: RunConfig,
        formulas: Formulas,
        result: R,
        csv: Option<CsvTable>,
    ) -> CliResult<Report<R>> {
        let report = Report {
            version: REPORT_VERSION,
            command: config.subcommand.clone(),
            config,
            formulas: formulas.into_map(),
            result,
            wall_time_s: self.elapsed(),
        };
        if let Some(path) = &self.json_out {
            write_json(path, &report)?;
        }
        if let (Some(path), Some(table)) = (&self.csv_out, csv) {
            table.write(path)?;
        }
        Ok(report)
    }
}

/// Header row plus records; written with `,` and LF.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| CliError::Encode(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Encode(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Encode(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_bytes()?).map_err(|e| CliError::io(path, e))
    }
}

/// Shortest round-trip decimal, matching the JSON output.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "NaN".into())
}
