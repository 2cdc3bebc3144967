//! Random polytopes and the joint distribution of their f-vectors.
//!
//! The pipeline draws i.i.d. point clouds ([`sampler`]), builds their convex
//! hulls ([`hull`]), counts faces ([`fvector`]), whitens the f-vector sample
//! ([`stats`]) and measures its distance to a standard Gaussian along random
//! projections ([`gausstest`]). [`pipeline`] ties the stages together and
//! handles persistence.

pub mod fvector;
pub mod gausstest;
pub mod hull;
pub mod pipeline;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use fvector::{check_identities, f_vector_from_facets, pairwise_intersection_fvector, FVector};
pub use gausstest::{dk_statistic, ks_distance, normal_cdf, KsResult};
pub use hull::{brute_force_facets, convex_hull, HullResult, Tolerance};
pub use rng::{make_stream, Purpose, RngStream, Seed, StreamKey};
pub use sampler::{sample, DistributionKind, PointCloud};
pub use stats::{sample_covariance, sample_mean, sym_eigen, SampleMatrix, WhiteningMap};
