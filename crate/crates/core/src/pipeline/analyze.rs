use std::path::Path;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use super::dataset::{meta_path, read_dataset, read_meta};
use super::{PipelineError, RunConfig};
use crate::gausstest::{direction_for, dk_statistic};
use crate::rng::Seed;
use crate::stats::{SampleMatrix, WhiteningMap};

const WORST_DIRECTIONS: usize = 10;
const QUANTILES: [f64; 9] = [0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WorstDirection {
    pub index: usize,
    pub d_k: f64,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub q: f64,
    pub value: f64,
}

/// JSON summary of one analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunSummary {
    /// Generation config, when the dataset sidecar was found.
    pub config: Option<RunConfig>,
    pub samples: usize,
    pub d: usize,
    pub mean_f_vector: Vec<f64>,
    /// All eigenvalues of the sample covariance, decreasing.
    pub eigenvalues: Vec<f64>,
    pub p: usize,
    pub whitening: WhiteningMap,
    #[serde(rename = "M")]
    pub directions: usize,
    pub direction_seed: Seed,
    #[serde(rename = "D_K")]
    pub d_k: f64,
    pub argmax_direction: usize,
    pub worst_directions: Vec<WorstDirection>,
    pub per_direction_quantiles: Vec<QuantilePoint>,
    /// Seconds: generation (when known) plus analysis.
    pub wall_time: f64,
    pub resample_count: u64,
}

/// Whitening plus `D_K` for an in-memory sample.
pub fn analyze_matrix(
    data: &SampleMatrix,
    m: usize,
    seed: Seed,
    rel_tol: f64,
) -> Result<RunSummary, PipelineError> {
    let start = Instant::now();
    if m == 0 {
        return Err(PipelineError::Validation("M must be at least 1".into()));
    }
    let (whitening, eig) = WhiteningMap::fit(data, rel_tol)?;
    let white = whitening.apply_all(data)?;
    let ks = dk_statistic(&white, m, seed)?;
    let worst_directions = ks
        .worst(WORST_DIRECTIONS)
        .into_iter()
        .map(|i| {
            Ok(WorstDirection {
                index: i,
                d_k: ks.per_direction[i],
                direction: direction_for(seed, i, whitening.p)?.0,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(RunSummary {
        config: None,
        samples: data.len(),
        d: data.dim(),
        mean_f_vector: whitening.mean.clone(),
        eigenvalues: eig.values,
        p: whitening.p,
        directions: m,
        direction_seed: seed,
        d_k: ks.d_k,
        argmax_direction: ks.argmax,
        worst_directions,
        per_direction_quantiles: QUANTILES
            .iter()
            .map(|&q| QuantilePoint {
                q,
                value: ks.quantile(q),
            })
            .collect(),
        whitening,
        wall_time: start.elapsed().as_secs_f64(),
        resample_count: 0,
    })
}

/// Reads a dataset, whitens it, computes `D_K` over `m` directions keyed by
/// `seed`, and writes the JSON summary to `out` when given.
pub fn analyze(
    dataset: &Path,
    m: usize,
    seed: Seed,
    rel_tol: f64,
    out: Option<&Path>,
) -> Result<RunSummary, PipelineError> {
    let (d, rows) = read_dataset(dataset)?;
    if rows.len() < 2 {
        return Err(PipelineError::malformed(
            dataset,
            format!("need at least 2 rows, got {}", rows.len()),
        ));
    }
    let flat: Vec<f64> = rows.iter().flat_map(|f| f.as_f64()).collect();
    let data = SampleMatrix::new(d, flat)?;
    let mut summary = analyze_matrix(&data, m, seed, rel_tol)?;
    if let Some(meta) = read_meta(&meta_path(dataset))? {
        summary.wall_time += meta.wall_time;
        summary.resample_count = meta.resample_count;
        summary.config = Some(meta.config);
    }
    info!(
        "{}: N={} d={} p={} D_K={:.6} (M={m})",
        dataset.display(),
        summary.samples,
        d,
        summary.p,
        summary.d_k
    );
    if let Some(out) = out {
        write_summary(out, &summary)?;
    }
    Ok(summary)
}

pub(crate) fn write_summary(path: &Path, summary: &RunSummary) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    std::fs::write(path, text + "\n").map_err(|e| PipelineError::io(path, e))
}

pub(crate) fn read_summary(path: &Path) -> Result<RunSummary, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::malformed(path, e.to_string()))
}

impl RunSummary {
    pub fn read(path: &Path) -> Result<Self, PipelineError> {
        read_summary(path)
    }

    pub fn write(&self, path: &Path) -> Result<(), PipelineError> {
        write_summary(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fvector::FVector;
    use crate::pipeline::write_dataset;

    #[test]
    fn identical_rows_are_degenerate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("same.csv");
        write_dataset(&p, 3, &vec![FVector(vec![4, 6, 4]); 10]).unwrap();
        assert!(matches!(
            analyze(&p, 10, Seed(1), 1e-8, None),
            Err(PipelineError::DegenerateCovariance)
        ));
    }

    #[test]
    fn too_few_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("one.csv");
        write_dataset(&p, 3, &[FVector(vec![4, 6, 4])]).unwrap();
        assert_eq!(analyze(&p, 10, Seed(1), 1e-8, None).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn summary_round_trips() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|k| {
                let a = (k % 7) as f64;
                let b = (k % 5) as f64;
                vec![a, b, a + b, 2.0 * a - b]
            })
            .collect();
        let data = SampleMatrix::from_rows(&rows).unwrap();
        let summary = analyze_matrix(&data, 25, Seed(9), 1e-8).unwrap();
        assert_eq!(summary.p, 2);
        assert_eq!(summary.worst_directions.len(), 10);
        assert_eq!(summary.worst_directions[0].d_k, summary.d_k);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        summary.write(&a).unwrap();
        let back = RunSummary::read(&a).unwrap();
        assert_eq!(back, summary);
        back.write(&b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}
