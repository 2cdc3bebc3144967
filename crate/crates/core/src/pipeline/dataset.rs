//! f-vector datasets: CSV with header `f0,f1,...`, one replicate per row,
//! plus a JSON sidecar describing how the rows were produced.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{PipelineError, RunConfig};
use crate::fvector::FVector;
use crate::hull::HullDiagnostics;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HullTotals {
    pub points_processed: u64,
    pub facets_created: u64,
    pub facets_deleted: u64,
}

impl HullTotals {
    pub fn add(&mut self, d: &HullDiagnostics) {
        self.points_processed += d.points_processed as u64;
        self.facets_created += d.facets_created as u64;
        self.facets_deleted += d.facets_deleted as u64;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetMeta {
    pub config: RunConfig,
    pub rows: usize,
    pub resample_count: u64,
    /// Seconds spent simulating.
    pub wall_time: f64,
    pub hull: HullTotals,
}

/// `<dataset>.meta.json`
pub fn meta_path(dataset: &Path) -> PathBuf {
    let mut name = dataset.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn header(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("f{i}")).collect()
}

pub fn write_dataset(path: &Path, d: usize, rows: &[FVector]) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", header(d).join(",")).map_err(io)?;
    for (k, f) in rows.iter().enumerate() {
        if f.dim() != d {
            return Err(PipelineError::malformed(
                path,
                format!("row {k} has width {}, expected {d}", f.dim()),
            ));
        }
        let line: Vec<String> = f.0.iter().map(u64::to_string).collect();
        writeln!(out, "{}", line.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a dataset; returns its width `d` and the rows.
pub fn read_dataset(path: &Path) -> Result<(usize, Vec<FVector>), PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| PipelineError::malformed(path, e.to_string()))?
        .clone();
    let d = headers.len();
    if d == 0 || headers.iter().ne(header(d).iter().map(String::as_str)) {
        return Err(PipelineError::malformed(
            path,
            format!("expected header f0,...,f{{d-1}}, got {:?}", headers.iter().collect::<Vec<_>>()),
        ));
    }
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| PipelineError::malformed(path, e.to_string()))?;
        let counts = record
            .iter()
            .map(|field| field.trim().parse::<u64>())
            .collect::<Result<Vec<u64>, _>>()
            .map_err(|e| PipelineError::malformed(path, format!("row {k}: {e}")))?;
        rows.push(FVector(counts));
    }
    Ok((d, rows))
}

pub fn write_meta(path: &Path, meta: &DatasetMeta) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(meta).expect("metadata serializes");
    std::fs::write(path, text + "\n").map_err(|e| PipelineError::io(path, e))
}

/// Reads the sidecar if present.
pub fn read_meta(path: &Path) -> Result<Option<DatasetMeta>, PipelineError> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| PipelineError::malformed(path, e.to_string())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(PipelineError::io(path, e)),
    }
}
