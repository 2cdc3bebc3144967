//! Convex hulls of point clouds in general position.
//!
//! [`convex_hull`] is an incremental quickhull producing simplicial facets
//! with outward unit normals and ridge adjacency. [`brute_force_facets`]
//! enumerates every `d`-subset and is only meant for small test instances.

mod brute;
mod geometry;
mod quickhull;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::sampler::PointCloud;

pub use brute::{brute_force_facets, brute_force_facets_capped, DEFAULT_BRUTE_FORCE_CAP};
pub use geometry::{orientation, Plane, Side};
pub use quickhull::convex_hull;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HullError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("need at least d + 1 = {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("points are affinely dependent within tolerance")]
    RankDeficient,
    #[error("point dimensions do not agree")]
    DimensionMismatch,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("brute-force enumeration is capped at {cap} points, got {got}")]
    TooManyPoints { cap: usize, got: usize },
}

/// Relative sidedness threshold. The absolute threshold is `rel_eps · scale`,
/// where `scale` defaults to the largest absolute input coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub scale: Option<f64>,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_eps: 1e-10,
            scale: None,
        }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64) -> Self {
        assert!(rel_eps > 0.0, "relative tolerance must be positive");
        Tolerance {
            rel_eps,
            scale: None,
        }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Tolerance {
            scale: Some(scale),
            ..self
        }
    }

    /// Absolute threshold for `cloud`.
    pub fn absolute_for(&self, cloud: &PointCloud) -> f64 {
        self.rel_eps * self.scale.unwrap_or_else(|| cloud.max_abs())
    }
}

/// A simplicial facet: `d` sorted vertex indices and its outward hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Facet {
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        geometry::dot(&self.normal, p) - self.offset
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HullDiagnostics {
    pub points_processed: usize,
    pub facets_created: usize,
    pub facets_deleted: usize,
}

impl std::ops::AddAssign for HullDiagnostics {
    fn add_assign(&mut self, rhs: Self) {
        self.points_processed += rhs.points_processed;
        self.facets_created += rhs.facets_created;
        self.facets_deleted += rhs.facets_deleted;
    }
}

#[derive(Debug, Clone)]
pub struct HullResult {
    pub d: usize,
    pub facets: Vec<Facet>,
    /// `neighbors[f][k]` is the facet sharing the ridge of `f` opposite its `k`-th vertex.
    pub neighbors: Vec<Vec<usize>>,
    /// Sorted input indices that are vertices of the hull.
    pub vertex_indices: Vec<usize>,
    pub diagnostics: HullDiagnostics,
}

impl HullResult {
    pub fn facet_tuples(&self) -> Vec<Vec<usize>> {
        self.facets.iter().map(|f| f.vertices.clone()).collect()
    }

    pub fn facet_set(&self) -> BTreeSet<Vec<usize>> {
        self.facets.iter().map(|f| f.vertices.clone()).collect()
    }

    /// Largest signed distance of any input point above any facet hyperplane.
    pub fn max_violation(&self, cloud: &PointCloud) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for f in &self.facets {
            for p in cloud.points() {
                worst = worst.max(f.signed_distance(p));
            }
        }
        worst
    }

    /// Every ridge occurs in exactly two facets, and the stored adjacency agrees.
    pub fn ridges_are_regular(&self) -> bool {
        let mut count: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in &self.facets {
            for skip in 0..self.d {
                let ridge: Vec<usize> = f
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *count.entry(ridge).or_default() += 1;
            }
        }
        if count.values().any(|&c| c != 2) {
            return false;
        }
        self.facets.iter().enumerate().all(|(fi, f)| {
            (0..self.d).all(|k| {
                let g = &self.facets[self.neighbors[fi][k]];
                let shared = f
                    .vertices
                    .iter()
                    .filter(|v| g.vertices.binary_search(v).is_ok())
                    .count();
                shared == self.d - 1 && g.vertices.binary_search(&f.vertices[k]).is_err()
            })
        })
    }
}
