//! Distribution and estimate files.
//!
//! MCD1: the bytes `MCD1`, `n` as a little-endian `u32`, then `2^n`
//! little-endian `f64` values in ascending mask order. The JSON form
//! `{"n": …, "probs": […]}` is accepted for `n ≤ 16`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use monocube::dist::{DenseDistribution, MAX_DENSE_DIM};
use monocube::estimators::{EstimateTable, LearnerParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"MCD1";
pub const JSON_MAX_DIM: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Mcd1,
    Json,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    n: u32,
    probs: Vec<f64>,
}

pub fn encode_mcd1(n: u32, values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&n.to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_mcd1(bytes: &[u8]) -> Result<(u32, Vec<f64>), String> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err("missing MCD1 header".into());
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if n > MAX_DENSE_DIM {
        return Err(format!("dimension {n} exceeds {MAX_DENSE_DIM}"));
    }
    let body = &bytes[8..];
    let expected = 8usize << n;
    if body.len() != expected {
        return Err(format!("expected {expected} payload bytes for n = {n}, found {}", body.len()));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((n, values))
}

/// A raw table from either format; sniffed by the magic bytes.
pub fn read_table(path: &Path) -> CliResult<(u32, Vec<f64>)> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        return decode_mcd1(&bytes).map_err(|r| CliError::malformed(path, r));
    }
    let table: JsonTable = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::malformed(path, format!("neither MCD1 nor JSON table: {e}")))?;
    if table.n > JSON_MAX_DIM {
        return Err(CliError::malformed(path, format!("JSON tables are limited to n ≤ {JSON_MAX_DIM}")));
    }
    if table.probs.len() != 1usize << table.n {
        return Err(CliError::malformed(path, "probs length is not 2^n"));
    }
    Ok((table.n, table.probs))
}

pub fn read_distribution(path: &Path) -> CliResult<DenseDistribution> {
    let (_, probs) = read_table(path)?;
    DenseDistribution::new(probs).map_err(|e| CliError::malformed(path, e.to_string()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_table(path: &Path, n: u32, values: &[f64], format: TableFormat) -> CliResult<()> {
    match format {
        TableFormat::Mcd1 => write_bytes(path, &encode_mcd1(n, values)),
        TableFormat::Json => {
            if n > JSON_MAX_DIM {
                return Err(CliError::Usage(format!("JSON tables are limited to n ≤ {JSON_MAX_DIM}")));
            }
            let table = JsonTable { n, probs: values.to_vec() };
            write_json(path, &table)
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Encode(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateSidecar {
    pub params: LearnerParams,
    pub seed: u64,
    #[serde(rename = "N")]
    pub samples: u64,
}

/// `ρ̂` as MCD1 at `path`, parameters in `path.json`.
pub fn write_estimate(path: &Path, table: &EstimateTable, sidecar: &EstimateSidecar) -> CliResult<()> {
    write_table(path, table.n, &table.rho_hat, TableFormat::Mcd1)?;
    write_json(&sidecar_path(path), sidecar)
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
