//! Python bindings for the random polytope toolkit.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rp::hull::HullError;
use rp::pipeline::{self, Parallelism, PipelineError, RunConfig};
use rp::sampler::SampleError;
use rp::stats::StatsError;
use rp::{DistributionKind, FVector, PointCloud, SampleMatrix, Seed, Tolerance};

fn pipeline_err(e: PipelineError) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        4 => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn hull_err(e: HullError) -> PyErr {
    match e {
        HullError::DegenerateInput(_) | HullError::RankDeficient => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn stats_err(e: StatsError) -> PyErr {
    pipeline_err(e.into())
}

fn kind(name: &str) -> PyResult<DistributionKind> {
    name.parse().map_err(|e: SampleError| value_err(e))
}

fn cloud(points: Vec<Vec<f64>>) -> PyResult<PointCloud> {
    PointCloud::from_rows(&points).map_err(value_err)
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<SampleMatrix> {
    SampleMatrix::from_rows(&rows).map_err(stats_err)
}

fn rows_of(m: &SampleMatrix) -> Vec<Vec<f64>> {
    m.rows().map(<[f64]>::to_vec).collect()
}

fn to_json(py: Python<'_>, value: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Draws `n` points of distribution `dist` in R^d from the stream of
/// `(seed, replicate)`.
#[pyfunction]
#[pyo3(signature = (dist, d, n, seed=0, replicate=0))]
fn sample(dist: &str, d: usize, n: usize, seed: u64, replicate: u64) -> PyResult<Vec<Vec<f64>>> {
    let mut stream = rp::make_stream(rp::StreamKey::new(Seed(seed), replicate, rp::Purpose::Points));
    let c = rp::sample(kind(dist)?, &mut stream, d, n).map_err(value_err)?;
    Ok(c.points().map(<[f64]>::to_vec).collect())
}

#[pyclass(frozen, name = "Hull")]
struct PyHull {
    #[pyo3(get)]
    d: usize,
    /// Sorted vertex indices of each facet.
    #[pyo3(get)]
    facets: Vec<Vec<usize>>,
    #[pyo3(get)]
    normals: Vec<Vec<f64>>,
    #[pyo3(get)]
    offsets: Vec<f64>,
    #[pyo3(get)]
    vertex_indices: Vec<usize>,
    #[pyo3(get)]
    facets_created: usize,
    #[pyo3(get)]
    facets_deleted: usize,
}

#[pymethods]
impl PyHull {
    fn f_vector(&self) -> PyResult<Vec<u64>> {
        Ok(rp::f_vector_from_facets(self.d, &self.facets).map_err(value_err)?.0)
    }

    fn __len__(&self) -> usize {
        self.facets.len()
    }

    fn __repr__(&self) -> String {
        format!("Hull(d={}, facets={}, vertices={})", self.d, self.facets.len(), self.vertex_indices.len())
    }
}

#[pyfunction]
#[pyo3(signature = (points, rel_eps=1e-10))]
fn convex_hull(points: Vec<Vec<f64>>, rel_eps: f64) -> PyResult<PyHull> {
    let h = rp::convex_hull(&cloud(points)?, &Tolerance::new(rel_eps)).map_err(hull_err)?;
    Ok(PyHull {
        d: h.d,
        facets: h.facet_tuples(),
        normals: h.facets.iter().map(|f| f.normal.clone()).collect(),
        offsets: h.facets.iter().map(|f| f.offset).collect(),
        vertex_indices: h.vertex_indices,
        facets_created: h.diagnostics.facets_created,
        facets_deleted: h.diagnostics.facets_deleted,
    })
}

#[pyfunction]
#[pyo3(signature = (points, rel_eps=1e-10))]
fn brute_force_facets(points: Vec<Vec<f64>>, rel_eps: f64) -> PyResult<Vec<Vec<usize>>> {
    let set = rp::brute_force_facets(&cloud(points)?, &Tolerance::new(rel_eps)).map_err(hull_err)?;
    Ok(set.into_iter().collect())
}

#[pyfunction]
fn f_vector(d: usize, facets: Vec<Vec<usize>>) -> PyResult<Vec<u64>> {
    Ok(rp::f_vector_from_facets(d, &facets).map_err(value_err)?.0)
}

#[pyfunction]
fn pairwise_intersection_f_vector(d: usize, facets: Vec<Vec<usize>>) -> PyResult<Vec<u64>> {
    Ok(rp::pairwise_intersection_fvector(d, &facets).map_err(value_err)?.0)
}

/// `(euler_ok, ridge_facet_ok)` for an f-vector.
#[pyfunction]
fn check_identities(f: Vec<u64>) -> (bool, bool) {
    let r = rp::check_identities(&FVector(f));
    (r.euler_ok, r.ridge_facet_ok)
}

/// f-vector of one random polytope: replicate `replicate` of the run keyed
/// by `seed`, resampled on degenerate input.
#[pyfunction]
#[pyo3(signature = (dist, d, n, seed=0, replicate=0))]
fn random_polytope_f_vector(dist: &str, d: usize, n: usize, seed: u64, replicate: usize) -> PyResult<Vec<u64>> {
    let config = RunConfig {
        seed: Seed(seed),
        ..RunConfig::new(kind(dist)?, d, n, replicate.max(1) + 1)
    };
    config.validate().map_err(pipeline_err)?;
    Ok(pipeline::run_replicate(&config, replicate).map_err(pipeline_err)?.fvector.0)
}

#[pyfunction]
fn normal_cdf(t: f64) -> f64 {
    rp::normal_cdf(t)
}

#[pyfunction]
fn ks_distance(values: Vec<f64>) -> PyResult<f64> {
    rp::ks_distance(&values).map_err(value_err)
}

/// `D_K` of already whitened rows over `m` seeded directions, with the
/// per-direction distances.
#[pyfunction]
#[pyo3(signature = (rows, m, seed=0))]
fn dk_statistic(rows: Vec<Vec<f64>>, m: usize, seed: u64) -> PyResult<(f64, usize, Vec<f64>)> {
    let r = rp::dk_statistic(&matrix(rows)?, m, Seed(seed)).map_err(value_err)?;
    Ok((r.d_k, r.argmax, r.per_direction))
}

#[pyclass(frozen, name = "WhiteningMap")]
struct PyWhiteningMap {
    inner: rp::WhiteningMap,
}

#[pymethods]
impl PyWhiteningMap {
    /// Fits the map to the rows' own mean and covariance.
    #[staticmethod]
    #[pyo3(signature = (rows, rel_tol=1e-8))]
    fn fit(rows: Vec<Vec<f64>>, rel_tol: f64) -> PyResult<Self> {
        let (inner, _) = rp::WhiteningMap::fit(&matrix(rows)?, rel_tol).map_err(stats_err)?;
        Ok(PyWhiteningMap { inner })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean.clone()
    }

    #[getter]
    fn kept_eigenvalues(&self) -> Vec<f64> {
        self.inner.kept_eigenvalues.clone()
    }

    #[getter]
    fn kept_vectors(&self) -> Vec<Vec<f64>> {
        self.inner.kept_vectors.clone()
    }

    fn apply(&self, f: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&f).map_err(stats_err)
    }

    fn apply_all(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows_of(&self.inner.apply_all(&matrix(rows)?).map_err(stats_err)?))
    }

    fn __repr__(&self) -> String {
        format!("WhiteningMap(d={}, p={})", self.inner.input_dim(), self.inner.p)
    }
}

/// Simulates `replicates` polytopes and writes their f-vectors as CSV.
/// Returns the number of degenerate draws that were resampled.
#[pyfunction]
#[pyo3(signature = (dist, d, n, replicates, out, seed=0, threads=None))]
#[allow(clippy::too_many_arguments)]
fn generate(
    py: Python<'_>,
    dist: &str,
    d: usize,
    n: usize,
    replicates: usize,
    out: PathBuf,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<u64> {
    let config = RunConfig {
        seed: Seed(seed),
        parallelism: threads.map_or(Parallelism::Auto, Parallelism::Threads),
        ..RunConfig::new(kind(dist)?, d, n, replicates)
    };
    let sim = py.detach(|| pipeline::generate(&config, &out)).map_err(pipeline_err)?;
    Ok(sim.resample_count)
}

/// Whitens a dataset and computes `D_K`; returns the summary as a dict and
/// optionally writes it as JSON.
#[pyfunction]
#[pyo3(signature = (path, m=100_000, seed=0, rel_tol=1e-8, out=None))]
fn analyze(
    py: Python<'_>,
    path: PathBuf,
    m: usize,
    seed: u64,
    rel_tol: f64,
    out: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let summary = py
        .detach(|| pipeline::analyze(&path, m, Seed(seed), rel_tol, out.as_deref()))
        .map_err(pipeline_err)?;
    to_json(py, &summary)
}

/// Whitening plus `D_K` for in-memory rows.
#[pyfunction]
#[pyo3(signature = (rows, m=1000, seed=0, rel_tol=1e-8))]
fn analyze_rows(py: Python<'_>, rows: Vec<Vec<f64>>, m: usize, seed: u64, rel_tol: f64) -> PyResult<Py<PyAny>> {
    let data = matrix(rows)?;
    let summary = py
        .detach(|| pipeline::analyze_matrix(&data, m, Seed(seed), rel_tol))
        .map_err(pipeline_err)?;
    to_json(py, &summary)
}

#[pymodule]
fn randpoly(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_facets, m)?)?;
    m.add_function(wrap_pyfunction!(f_vector, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_intersection_f_vector, m)?)?;
    m.add_function(wrap_pyfunction!(check_identities, m)?)?;
    m.add_function(wrap_pyfunction!(random_polytope_f_vector, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(dk_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_rows, m)?)?;
    m.add_class::<PyHull>()?;
    m.add_class::<PyWhiteningMap>()?;
    m.add("DISTRIBUTIONS", DistributionKind::ALL.map(DistributionKind::name).to_vec())?;
    Ok(())
}
