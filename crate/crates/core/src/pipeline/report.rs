//! Plot-ready data: per-component histograms and the whitened scatter.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::analyze::read_summary;
use super::dataset::read_dataset;
use super::PipelineError;
use crate::stats::SampleMatrix;

/// Upper bound on bins per histogram.
const MAX_BINS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub width: f64,
    pub bins: Vec<(f64, f64, u64)>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.2).sum()
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Freedman–Diaconis histogram: width `2·IQR·N^{-1/3}`, bins starting at the
/// minimum. Falls back to unit width when the IQR is zero. Every value falls
/// in exactly one bin; the last bin is closed on the right.
pub fn freedman_diaconis(values: &[f64]) -> Histogram {
    if values.is_empty() {
        return Histogram {
            width: 1.0,
            bins: Vec::new(),
        };
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    if width <= 0.0 || !width.is_finite() {
        width = 1.0;
    }
    let mut count = (((max - min) / width).ceil() as usize).max(1);
    if count > MAX_BINS {
        count = MAX_BINS;
        width = (max - min) / count as f64;
    }
    let mut counts = vec![0u64; count];
    for &v in &sorted {
        let slot = (((v - min) / width).floor() as usize).min(count - 1);
        counts[slot] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (min + i as f64 * width, min + (i + 1) as f64 * width, c))
        .collect();
    Histogram { width, bins }
}

pub fn write_histogram(path: &Path, h: &Histogram) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(out, "binLeft,binRight,count").map_err(io)?;
    for (l, r, c) in &h.bins {
        writeln!(out, "{l},{r},{c}").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_histogram(path: &Path) -> Result<Histogram, PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let malformed = |e: String| PipelineError::malformed(path, e);
    let headers = reader.headers().map_err(|e| malformed(e.to_string()))?;
    if headers.iter().ne(["binLeft", "binRight", "count"]) {
        return Err(malformed("expected header binLeft,binRight,count".into()));
    }
    let mut bins = Vec::new();
    for record in reader.records() {
        let r = record.map_err(|e| malformed(e.to_string()))?;
        let l: f64 = r[0].parse().map_err(|e| malformed(format!("{e}")))?;
        let rt: f64 = r[1].parse().map_err(|e| malformed(format!("{e}")))?;
        let c: u64 = r[2].parse().map_err(|e| malformed(format!("{e}")))?;
        bins.push((l, rt, c));
    }
    let width = bins.first().map_or(1.0, |b| b.1 - b.0);
    Ok(Histogram { width, bins })
}

pub fn write_scatter(path: &Path, data: &SampleMatrix) -> Result<(), PipelineError> {
    let io = |e: std::io::Error| PipelineError::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    let header: Vec<String> = (0..data.dim()).map(|i| format!("w{i}")).collect();
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for row in data.rows() {
        let line: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(out, "{}", line.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_scatter(path: &Path) -> Result<SampleMatrix, PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let malformed = |e: String| PipelineError::malformed(path, e);
    let p = reader.headers().map_err(|e| malformed(e.to_string()))?.len();
    let mut flat = Vec::new();
    for record in reader.records() {
        let r = record.map_err(|e| malformed(e.to_string()))?;
        for field in r.iter() {
            flat.push(field.parse::<f64>().map_err(|e| malformed(e.to_string()))?);
        }
    }
    SampleMatrix::new(p.max(1), flat).map_err(|e| malformed(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ComponentMeta {
    component: String,
    file: String,
    bin_width: f64,
    bins: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct ReportMeta {
    binning: &'static str,
    samples: usize,
    p: usize,
    components: Vec<ComponentMeta>,
    scatter: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub histograms: Vec<PathBuf>,
    pub scatter: PathBuf,
    pub meta: PathBuf,
}

/// Writes `hist_f{i}.csv` per component, `whitened.csv` (whitened with the
/// map stored in the summary) and `report.json` into `out_dir`.
pub fn report(dataset: &Path, summary: &Path, out_dir: &Path) -> Result<ReportFiles, PipelineError> {
    let (d, rows) = read_dataset(dataset)?;
    if rows.is_empty() {
        return Err(PipelineError::malformed(dataset, "dataset has no rows"));
    }
    let summary = read_summary(summary)?;
    if summary.whitening.input_dim() != d {
        return Err(PipelineError::malformed(
            dataset,
            format!("width {d} does not match summary dimension {}", summary.whitening.input_dim()),
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;

    let mut histograms = Vec::with_capacity(d);
    let mut components = Vec::with_capacity(d);
    for i in 0..d {
        let values: Vec<f64> = rows.iter().map(|f| f.0[i] as f64).collect();
        let h = freedman_diaconis(&values);
        let name = format!("hist_f{i}.csv");
        let path = out_dir.join(&name);
        write_histogram(&path, &h)?;
        components.push(ComponentMeta {
            component: format!("f{i}"),
            file: name,
            bin_width: h.width,
            bins: h.bins.len(),
        });
        histograms.push(path);
    }

    let flat: Vec<f64> = rows.iter().flat_map(|f| f.as_f64()).collect();
    let data = SampleMatrix::new(d, flat)?;
    let white = summary.whitening.apply_all(&data)?;
    let scatter = out_dir.join("whitened.csv");
    write_scatter(&scatter, &white)?;

    let meta = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(&ReportMeta {
        binning: "freedman-diaconis (width 2*IQR*N^(-1/3), unit width when IQR is 0)",
        samples: rows.len(),
        p: summary.whitening.p,
        components,
        scatter: "whitened.csv".into(),
    })
    .expect("report metadata serializes");
    std::fs::write(&meta, text + "\n").map_err(|e| PipelineError::io(&meta, e))?;

    Ok(ReportFiles {
        histograms,
        scatter,
        meta,
    })
}
