//! End-to-end experiment: generate f-vector datasets, analyze them, emit
//! plot-ready reports and aggregated tables.

mod analyze;
mod config;
mod dataset;
mod presets;
mod report;
mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::fvector::{check_identities, f_vector_from_facets, FVector, FVectorError};
use crate::gausstest::GaussTestError;
use crate::hull::{convex_hull, HullDiagnostics, HullError, Tolerance};
use crate::rng::{make_stream, Purpose, StreamKey};
use crate::sampler::{sample, SampleError};
use crate::stats::StatsError;

pub use analyze::{analyze, analyze_matrix, QuantilePoint, RunSummary, WorstDirection};
pub use config::{Parallelism, RunConfig, THREADS_ENV};
pub use dataset::{
    meta_path, read_dataset, read_meta, write_dataset, write_meta, DatasetMeta, HullTotals,
};
pub use presets::{preset, preset_names, Preset, PresetRow};
pub use report::{
    freedman_diaconis, read_histogram, read_scatter, report, write_histogram, write_scatter,
    Histogram, ReportFiles,
};
pub use table::{format_table, run_table, write_table_csv, TableRow};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("malformed dataset {path}: {reason}")]
    MalformedDataset { path: PathBuf, reason: String },
    #[error("replicate {replicate} stayed degenerate after {attempts} attempts")]
    TooManyDegenerateResamples { replicate: usize, attempts: u32 },
    #[error("replicate {replicate} violates a face-count identity: {fvector}")]
    IdentityViolation { replicate: usize, fvector: FVector },
    #[error("covariance is degenerate (all f-vectors identical)")]
    DegenerateCovariance,
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    FVector(#[from] FVectorError),
    #[error(transparent)]
    Stats(StatsError),
    #[error(transparent)]
    GaussTest(#[from] GaussTestError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl From<StatsError> for PipelineError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::DegenerateCovariance => PipelineError::DegenerateCovariance,
            other => PipelineError::Stats(other),
        }
    }
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(path: &Path, reason: impl Into<String>) -> Self {
        PipelineError::MalformedDataset {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }

    /// Process exit code: 2 validation, 3 degenerate-input exhaustion, 4 I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_)
            | PipelineError::MalformedDataset { .. }
            | PipelineError::Sample(_) => 2,
            PipelineError::TooManyDegenerateResamples { .. } => 3,
            PipelineError::Io { .. } => 4,
            _ => 1,
        }
    }
}

/// One replicate's f-vector and bookkeeping.
#[derive(Debug, Clone)]
pub struct ReplicateOutcome {
    pub fvector: FVector,
    pub resamples: u32,
    pub diagnostics: HullDiagnostics,
}

/// Samples, hulls and counts faces for replicate `k`. A degenerate hull is
/// redrawn from the next sub-stream, up to `max_resamples` times.
pub fn run_replicate(config: &RunConfig, k: usize) -> Result<ReplicateOutcome, PipelineError> {
    let tol = Tolerance::default();
    let base = StreamKey::new(config.seed, k as u64, Purpose::Points);
    for attempt in 0..=config.max_resamples {
        let mut stream = make_stream(base.with_substream(attempt));
        let cloud = sample(config.kind, &mut stream, config.d, config.n)?;
        match convex_hull(&cloud, &tol) {
            Ok(hull) => {
                let fvector = f_vector_from_facets(config.d, &hull.facet_tuples())?;
                if !check_identities(&fvector).all_ok()
                    || fvector.0[0] != hull.vertex_indices.len() as u64
                {
                    return Err(PipelineError::IdentityViolation {
                        replicate: k,
                        fvector,
                    });
                }
                return Ok(ReplicateOutcome {
                    fvector,
                    resamples: attempt,
                    diagnostics: hull.diagnostics,
                });
            }
            Err(HullError::DegenerateInput(reason)) => {
                warn!("replicate {k} attempt {attempt}: {reason}; resampling");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(PipelineError::TooManyDegenerateResamples {
        replicate: k,
        attempts: config.max_resamples + 1,
    })
}

/// All replicates of a run, in replicate order.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub fvectors: Vec<FVector>,
    pub resample_count: u64,
    pub hull: HullTotals,
    pub wall_time: f64,
}

/// Runs every replicate on a pool of `config.parallelism` threads. Results
/// are collected in replicate order, so the output does not depend on the
/// thread count.
pub fn simulate(config: &RunConfig) -> Result<Simulation, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let threads = config.parallelism.resolve();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    info!(
        "simulating {} replicates of {} points ({} d={}) on {threads} threads",
        config.replicates, config.n, config.kind, config.d
    );
    let outcomes = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|k| run_replicate(config, k))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut hull = HullTotals::default();
    let mut resample_count = 0;
    let mut fvectors = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        resample_count += o.resamples as u64;
        hull.add(&o.diagnostics);
        fvectors.push(o.fvector);
    }
    Ok(Simulation {
        fvectors,
        resample_count,
        hull,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Simulates the run and writes the CSV dataset plus its `.meta.json` sidecar.
pub fn generate(config: &RunConfig, out: &Path) -> Result<Simulation, PipelineError> {
    let sim = simulate(config)?;
    write_dataset(out, config.d, &sim.fvectors)?;
    write_meta(
        &meta_path(out),
        &DatasetMeta {
            config: config.clone(),
            rows: sim.fvectors.len(),
            resample_count: sim.resample_count,
            wall_time: sim.wall_time,
            hull: sim.hull,
        },
    )?;
    if sim.resample_count > 0 {
        warn!("{} degenerate replicates were resampled", sim.resample_count);
    }
    info!("wrote {} f-vectors to {}", sim.fvectors.len(), out.display());
    Ok(sim)
}
