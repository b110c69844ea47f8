//! Run artifacts: CSV tables, JSON metadata and raw little-endian field
//! snapshots with a JSON sidecar. Every writer has a matching reader.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::spectra::Spectra;
use crate::swe2d::DiagnosticsRecord;
use crate::{Error, Result};

/// Bumped whenever a file layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema_version: u32,
    pub experiment: String,
    pub operator: String,
    /// Fully resolved configuration of the run.
    pub config: serde_json::Value,
    /// Scalar results worth reading without parsing the tables.
    pub summary: serde_json::Value,
    /// Artifact files relative to the run directory.
    pub files: Vec<String>,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, s + "\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path)?;
    serde_json::from_str(&s).map_err(|e| Error::InvalidData(format!("{}: {e}", path.display())))
}

pub fn read_metadata(path: &Path) -> Result<RunMetadata> {
    let m: RunMetadata = read_json(path)?;
    if m.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidData(format!(
            "schema version {} (expected {SCHEMA_VERSION})",
            m.schema_version
        )));
    }
    Ok(m)
}

/// Serializes `rows` with a header taken from the struct field names.
pub fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    #[serde(rename = "E_n")]
    pub e_n: f64,
    #[serde(rename = "E_omega")]
    pub e_omega: f64,
}

pub fn write_spectra_csv(path: &Path, s: &Spectra) -> Result<()> {
    let rows: Vec<SpectrumRow> = s
        .shell
        .iter()
        .zip(s.energy.iter().zip(&s.enstrophy))
        .map(|(&n, (&e_n, &e_omega))| SpectrumRow { n, e_n, e_omega })
        .collect();
    write_csv_rows(path, &rows)
}

pub fn read_spectra_csv(path: &Path) -> Result<Spectra> {
    let rows: Vec<SpectrumRow> = read_csv_rows(path)?;
    Ok(Spectra {
        shell: rows.iter().map(|r| r.n).collect(),
        energy: rows.iter().map(|r| r.e_n).collect(),
        enstrophy: rows.iter().map(|r| r.e_omega).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub re: f64,
    pub im: f64,
}

pub fn write_eigen_csv(path: &Path, eigenvalues: &[(f64, f64)]) -> Result<()> {
    let rows: Vec<EigenRow> = eigenvalues.iter().map(|&(re, im)| EigenRow { re, im }).collect();
    write_csv_rows(path, &rows)
}

pub fn read_eigen_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let rows: Vec<EigenRow> = read_csv_rows(path)?;
    Ok(rows.into_iter().map(|r| (r.re, r.im)).collect())
}

pub fn write_diagnostics_csv(path: &Path, series: &[DiagnosticsRecord]) -> Result<()> {
    write_csv_rows(path, series)
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    read_csv_rows(path)
}

/// One row of a 1D profile: numerical and (when known) exact fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub x: f64,
    pub h: f64,
    pub u: f64,
    pub h_exact: Option<f64>,
    pub u_exact: Option<f64>,
    pub b: Option<f64>,
}

/// Sidecar describing a raw snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub schema_version: u32,
    /// Row-major shape of each field, slowest index first.
    pub shape: Vec<usize>,
    pub dx: f64,
    pub t: f64,
    pub fields: Vec<String>,
    pub dtype: String,
    pub byte_order: String,
}

impl SnapshotHeader {
    pub fn new(shape: Vec<usize>, dx: f64, t: f64, fields: &[&str]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            shape,
            dx,
            t,
            fields: fields.iter().map(|s| s.to_string()).collect(),
            dtype: "f64".into(),
            byte_order: "little".into(),
        }
    }

    fn field_len(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Writes `<stem>.bin` (fields back to back) and `<stem>.json`; returns both paths.
pub fn write_snapshot(dir: &Path, stem: &str, header: &SnapshotHeader, fields: &[&[f64]]) -> Result<(PathBuf, PathBuf)> {
    if fields.len() != header.fields.len() {
        return Err(Error::LengthMismatch {
            expected: header.fields.len(),
            got: fields.len(),
        });
    }
    let len = header.field_len();
    let mut bytes = Vec::with_capacity(8 * len * fields.len());
    for f in fields {
        if f.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: f.len(),
            });
        }
        for v in f.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let bin = dir.join(format!("{stem}.bin"));
    let json = dir.join(format!("{stem}.json"));
    fs::write(&bin, bytes)?;
    write_json(&json, header)?;
    Ok((bin, json))
}

/// Reads a snapshot back as `(header, fields)`; `path` may name either file.
pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, Vec<Vec<f64>>)> {
    let header: SnapshotHeader = read_json(&path.with_extension("json"))?;
    if header.dtype != "f64" || header.byte_order != "little" {
        return Err(Error::InvalidData(format!(
            "unsupported snapshot encoding {} / {}",
            header.dtype, header.byte_order
        )));
    }
    let bytes = fs::read(path.with_extension("bin"))?;
    let len = header.field_len();
    if bytes.len() != 8 * len * header.fields.len() {
        return Err(Error::InvalidData(format!(
            "snapshot holds {} bytes, header implies {}",
            bytes.len(),
            8 * len * header.fields.len()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let fields = values.chunks(len.max(1)).take(header.fields.len()).map(|c| c.to_vec()).collect();
    Ok((header, fields))
}
