//! Point clouds drawn i.i.d. from the five supported distributions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("need at least d + 1 = {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("coordinate buffer of length {len} is not a multiple of d = {d}")]
    Shape { len: usize, d: usize },
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("unknown distribution {0:?} (expected cube, l1ball, l2ball, gaussian or halfball)")]
    UnknownDistribution(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistributionKind {
    /// Uniform in `[0, 1]^d`.
    #[serde(rename = "cube")]
    UnitCube,
    /// Uniform in the unit ℓ₁ ball.
    #[serde(rename = "l1ball")]
    L1Ball,
    /// Uniform in the unit Euclidean ball.
    #[serde(rename = "l2ball")]
    L2Ball,
    /// Standard normal in `R^d`.
    #[serde(rename = "gaussian")]
    Gaussian,
    /// Uniform in the half ball `{x : ‖x‖₂ ≤ 1, x₁ ≥ 0}`.
    #[serde(rename = "halfball")]
    HalfBall,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 5] = [
        DistributionKind::UnitCube,
        DistributionKind::L1Ball,
        DistributionKind::L2Ball,
        DistributionKind::Gaussian,
        DistributionKind::HalfBall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::UnitCube => "cube",
            DistributionKind::L1Ball => "l1ball",
            DistributionKind::L2Ball => "l2ball",
            DistributionKind::Gaussian => "gaussian",
            DistributionKind::HalfBall => "halfball",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistributionKind {
    type Err = SampleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistributionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SampleError::UnknownDistribution(s.to_string()))
    }
}

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self, SampleError> {
        if d == 0 || !coords.len().is_multiple_of(d) {
            return Err(SampleError::Shape {
                len: coords.len(),
                d,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(SampleError::NonFinite(pos / d));
        }
        Ok(PointCloud { d, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, SampleError> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(SampleError::Shape {
                    len: row.len(),
                    d,
                });
            }
            coords.extend_from_slice(row);
        }
        PointCloud::new(d, coords)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Largest absolute coordinate; the length scale for hull tolerances.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Applies `x ↦ A·x + b` to every point, with `A` given row-major.
    pub fn affine_map(&self, a: &[f64], b: &[f64]) -> PointCloud {
        let d = self.d;
        assert_eq!(a.len(), d * d);
        assert_eq!(b.len(), d);
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            for r in 0..d {
                let row = &a[r * d..(r + 1) * d];
                coords.push(row.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + b[r]);
            }
        }
        PointCloud { d, coords }
    }
}

/// Draws `n` i.i.d. points of `kind` in `R^d` from `stream`.
///
/// The ball constructions follow the classical projections: for the Euclidean
/// ball a standard Gaussian in `R^{d+2}` is normalized by its full norm and the
/// first `d` coordinates kept; for the ℓ₁ ball, `d + 1` Laplace variates are
/// normalized by their full ℓ₁ norm. The half ball folds the first coordinate
/// of a Euclidean-ball point.
pub fn sample(
    kind: DistributionKind,
    stream: &mut RngStream,
    d: usize,
    n: usize,
) -> Result<PointCloud, SampleError> {
    if d < 2 {
        return Err(SampleError::InvalidDimension(d));
    }
    if n < d + 1 {
        return Err(SampleError::InsufficientPoints {
            needed: d + 1,
            got: n,
        });
    }

    let mut coords = Vec::with_capacity(n * d);
    let mut scratch = vec![0.0; d + 2];
    for _ in 0..n {
        match kind {
            DistributionKind::UnitCube => coords.extend((0..d).map(|_| stream.uniform())),
            DistributionKind::Gaussian => coords.extend((0..d).map(|_| stream.standard_normal())),
            DistributionKind::L2Ball | DistributionKind::HalfBall => {
                for z in scratch.iter_mut() {
                    *z = stream.standard_normal();
                }
                let norm = scratch.iter().map(|z| z * z).sum::<f64>().sqrt();
                let start = coords.len();
                coords.extend(scratch[..d].iter().map(|z| z / norm));
                if kind == DistributionKind::HalfBall {
                    coords[start] = coords[start].abs();
                }
            }
            DistributionKind::L1Ball => {
                let z = &mut scratch[..d + 1];
                for v in z.iter_mut() {
                    *v = stream.laplace();
                }
                let norm = z.iter().map(|v| v.abs()).sum::<f64>();
                coords.extend(z[..d].iter().map(|v| v / norm));
            }
        }
    }
    Ok(PointCloud { d, coords })
}
