use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::analyze::write_summary;
use super::{analyze, generate, PipelineError, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub distribution: String,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub replicates: usize,
    #[serde(rename = "M")]
    pub directions: usize,
    pub p: usize,
    #[serde(rename = "D_K")]
    pub d_k: f64,
    #[serde(rename = "wallTime")]
    pub wall_time: f64,
    #[serde(rename = "referenceD_K")]
    pub reference_d_k: Option<f64>,
}

/// Runs generate + analyze for every config, writing datasets and summaries
/// under `work_dir`. All configs are validated before any work starts.
pub fn run_table(
    configs: &[(RunConfig, Option<f64>)],
    work_dir: &Path,
) -> Result<Vec<TableRow>, PipelineError> {
    for (c, _) in configs {
        c.validate()?;
    }
    if configs.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(work_dir).map_err(|e| PipelineError::io(work_dir, e))?;
    let mut rows = Vec::with_capacity(configs.len());
    for (i, (c, reference)) in configs.iter().enumerate() {
        let stem = format!("{i:02}_{}_d{}_n{}_N{}", c.kind, c.d, c.n, c.replicates);
        let dataset = work_dir.join(format!("{stem}.csv"));
        generate(c, &dataset)?;
        let summary = analyze(&dataset, c.directions, c.seed, c.rel_tol, None)?;
        write_summary(&work_dir.join(format!("{stem}.summary.json")), &summary)?;
        rows.push(TableRow {
            distribution: c.kind.to_string(),
            d: c.d,
            n: c.n,
            replicates: c.replicates,
            directions: c.directions,
            p: summary.p,
            d_k: summary.d_k,
            wall_time: summary.wall_time,
            reference_d_k: *reference,
        });
    }
    Ok(rows)
}

pub fn write_table_csv(path: &Path, rows: &[TableRow]) -> Result<(), PipelineError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| PipelineError::io(path, std::io::Error::other(e)))?;
    if rows.is_empty() {
        writer
            .write_record(["distribution", "d", "n", "N", "M", "p", "D_K", "wallTime", "referenceD_K"])
            .map_err(|e| PipelineError::io(path, std::io::Error::other(e)))?;
    }
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| PipelineError::io(path, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| PipelineError::io(path, e))
}

/// Fixed-width console rendering.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>2} {:>7} {:>7} {:>7} {:>2} {:>10} {:>10} {:>10}",
        "dist", "d", "n", "N", "M", "p", "D_K", "reference", "seconds"
    );
    for r in rows {
        let reference = r.reference_d_k.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            out,
            "{:<10} {:>2} {:>7} {:>7} {:>7} {:>2} {:>10.6} {:>10} {:>10.1}",
            r.distribution, r.d, r.n, r.replicates, r.directions, r.p, r.d_k, reference, r.wall_time
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::DistributionKind;

    #[test]
    fn empty_table_is_fine() {
        let dir = tempfile::tempdir().unwrap();
        let rows = run_table(&[], dir.path()).unwrap();
        assert!(rows.is_empty());
        let out = dir.path().join("t.csv");
        write_table_csv(&out, &rows).unwrap();
        assert!(std::fs::read_to_string(&out).unwrap().starts_with("distribution,d,n,N,M"));
    }

    #[test]
    fn validation_happens_first() {
        let dir = tempfile::tempdir().unwrap();
        let work = dir.path().join("work");
        let good = RunConfig::new(DistributionKind::Gaussian, 3, 30, 10);
        let bad = RunConfig::new(DistributionKind::Gaussian, 5, 5, 10);
        let err = run_table(&[(good, None), (bad, None)], &work).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(!work.exists());
    }

    #[test]
    fn small_table_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new(DistributionKind::L2Ball, 3, 40, 30);
        c.directions = 50;
        let rows = run_table(&[(c, Some(0.5))], dir.path()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].p, 1);
        assert!(rows[0].d_k > 0.0 && rows[0].d_k < 1.0);
        let text = format_table(&rows);
        assert!(text.contains("l2ball"));
        let out = dir.path().join("t.csv");
        write_table_csv(&out, &rows).unwrap();
        let csv = std::fs::read_to_string(&out).unwrap();
        assert!(csv.lines().next().unwrap().contains("referenceD_K"));
        assert_eq!(csv.lines().count(), 2);
    }
}
