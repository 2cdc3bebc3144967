//! Sample moments, eigendecomposition and whitening of f-vector samples.

mod eigen;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::{sym_eigen, EigenDecomp, MAX_SWEEPS};

/// Relative eigenvalue threshold below which a direction counts as null.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    EmptySample { needed: usize, got: usize },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in sample row {0}")]
    NonFinite(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("covariance has no positive eigenvalue (all samples identical)")]
    DegenerateCovariance,
    #[error("relative tolerance must be in (0, 1), got {0}")]
    InvalidTolerance(f64),
}

/// `N` rows of dimension `d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    d: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self, StatsError> {
        if d == 0 || !data.len().is_multiple_of(d) {
            return Err(StatsError::DimensionMismatch {
                expected: d,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(StatsError::NonFinite(pos / d));
        }
        Ok(SampleMatrix { d, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, StatsError> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(StatsError::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        SampleMatrix::new(d, data)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.d..(k + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Symmetric `d × d` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    d: usize,
    data: Vec<f64>,
}

impl CovMatrix {
    pub fn from_row_major(d: usize, data: Vec<f64>) -> Result<Self, StatsError> {
        if data.len() != d * d {
            return Err(StatsError::DimensionMismatch {
                expected: d * d,
                got: data.len(),
            });
        }
        let scale = data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..d {
            for j in i + 1..d {
                if (data[i * d + j] - data[j * d + i]).abs() > 1e-12 * scale {
                    return Err(StatsError::NotSymmetric);
                }
            }
        }
        Ok(CovMatrix { d, data })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn sample_mean(data: &SampleMatrix) -> Result<Vec<f64>, StatsError> {
    let n = data.len();
    if n == 0 {
        return Err(StatsError::EmptySample { needed: 1, got: 0 });
    }
    let mut mean = vec![0.0; data.dim()];
    for row in data.rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    Ok(mean)
}

/// Unbiased sample covariance, normalized by `1/(N-1)`.
pub fn sample_covariance(data: &SampleMatrix) -> Result<CovMatrix, StatsError> {
    let n = data.len();
    if n < 2 {
        return Err(StatsError::EmptySample { needed: 2, got: n });
    }
    let d = data.dim();
    let mean = sample_mean(data)?;
    let mut s = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for row in data.rows() {
        for ((c, x), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = x - m;
        }
        for i in 0..d {
            for j in i..d {
                s[i * d + j] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = s[i * d + j] / (n - 1) as f64;
            s[i * d + j] = v;
            s[j * d + i] = v;
        }
    }
    Ok(CovMatrix { d, data: s })
}

/// Affine map to mean zero and identity covariance on the retained eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WhiteningMap {
    pub mean: Vec<f64>,
    pub p: usize,
    pub kept_eigenvalues: Vec<f64>,
    /// Retained unit eigenvectors, one per kept eigenvalue.
    pub kept_vectors: Vec<Vec<f64>>,
    pub rel_tol: f64,
}

/// Keeps the eigenpairs with `λ_i > rel_tol · λ_1`.
pub fn build_whitening(
    mean: &[f64],
    eig: &EigenDecomp,
    rel_tol: f64,
) -> Result<WhiteningMap, StatsError> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(StatsError::InvalidTolerance(rel_tol));
    }
    if mean.len() != eig.values.len() {
        return Err(StatsError::DimensionMismatch {
            expected: eig.values.len(),
            got: mean.len(),
        });
    }
    let lead = eig.values.first().copied().unwrap_or(0.0);
    if lead <= 0.0 {
        return Err(StatsError::DegenerateCovariance);
    }
    let p = eig.values.iter().take_while(|&&l| l > rel_tol * lead).count();
    Ok(WhiteningMap {
        mean: mean.to_vec(),
        p,
        kept_eigenvalues: eig.values[..p].to_vec(),
        kept_vectors: eig.vectors[..p].to_vec(),
        rel_tol,
    })
}

impl WhiteningMap {
    /// Fits the map to `data`'s own mean and covariance.
    pub fn fit(data: &SampleMatrix, rel_tol: f64) -> Result<(WhiteningMap, EigenDecomp), StatsError> {
        let mean = sample_mean(data)?;
        let cov = sample_covariance(data)?;
        let eig = sym_eigen(&cov)?;
        let map = build_whitening(&mean, &eig, rel_tol)?;
        Ok((map, eig))
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    /// `(D*)^{-1/2} (U*)ᵀ (f - mean)`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, StatsError> {
        if f.len() != self.mean.len() {
            return Err(StatsError::DimensionMismatch {
                expected: self.mean.len(),
                got: f.len(),
            });
        }
        Ok(self.apply_unchecked(f))
    }

    fn apply_unchecked(&self, f: &[f64]) -> Vec<f64> {
        self.kept_vectors
            .iter()
            .zip(&self.kept_eigenvalues)
            .map(|(u, &l)| {
                let proj: f64 = u
                    .iter()
                    .zip(f.iter().zip(&self.mean))
                    .map(|(ui, (x, m))| ui * (x - m))
                    .sum();
                proj / l.sqrt()
            })
            .collect()
    }

    pub fn apply_all(&self, data: &SampleMatrix) -> Result<SampleMatrix, StatsError> {
        if data.dim() != self.mean.len() {
            return Err(StatsError::DimensionMismatch {
                expected: self.mean.len(),
                got: data.dim(),
            });
        }
        let mut out = Vec::with_capacity(data.len() * self.p);
        for row in data.rows() {
            out.extend(self.apply_unchecked(row));
        }
        SampleMatrix::new(self.p, out)
    }
}
