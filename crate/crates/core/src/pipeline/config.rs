use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PipelineError;
use crate::fvector::MAX_DIM;
use crate::rng::Seed;
use crate::sampler::DistributionKind;
use crate::stats::DEFAULT_REL_TOL;

/// Environment variable holding the default worker count for `auto`.
pub const THREADS_ENV: &str = "RANDPOLY_THREADS";

pub const DEFAULT_DIRECTIONS: usize = 100_000;
pub const DEFAULT_MAX_RESAMPLES: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Auto,
    Threads(usize),
}

impl Parallelism {
    /// Worker count: explicit, else `RANDPOLY_THREADS`, else one per core.
    pub fn resolve(self) -> usize {
        match self {
            Parallelism::Threads(t) => t.max(1),
            Parallelism::Auto => std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&t| t > 0)
                .unwrap_or_else(|| {
                    std::thread::available_parallelism().map_or(1, |n| n.get())
                }),
        }
    }
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::Auto => f.write_str("auto"),
            Parallelism::Threads(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for Parallelism {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Parallelism::Auto => s.serialize_str("auto"),
            Parallelism::Threads(t) => s.serialize_u64(*t as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Parallelism {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(usize),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(t) => Ok(Parallelism::Threads(t)),
            Repr::Word(w) if w == "auto" => Ok(Parallelism::Auto),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "parallelism must be an integer or \"auto\", got {w:?}"
            ))),
        }
    }
}

fn default_directions() -> usize {
    DEFAULT_DIRECTIONS
}

fn default_rel_tol() -> f64 {
    DEFAULT_REL_TOL
}

fn default_max_resamples() -> u32 {
    DEFAULT_MAX_RESAMPLES
}

/// One experiment: `replicates` hulls of `n` points in `R^d`, analyzed with
/// `directions` random projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub kind: DistributionKind,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub replicates: usize,
    #[serde(rename = "M", default = "default_directions")]
    pub directions: usize,
    #[serde(default)]
    pub seed: Seed,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub parallelism: Parallelism,
    #[serde(default = "default_max_resamples")]
    pub max_resamples: u32,
}

impl RunConfig {
    pub fn new(kind: DistributionKind, d: usize, n: usize, replicates: usize) -> Self {
        RunConfig {
            kind,
            d,
            n,
            replicates,
            directions: DEFAULT_DIRECTIONS,
            seed: Seed(0),
            rel_tol: DEFAULT_REL_TOL,
            parallelism: Parallelism::Auto,
            max_resamples: DEFAULT_MAX_RESAMPLES,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::Validation(msg));
        if !(2..=MAX_DIM).contains(&self.d) {
            return fail(format!("d must be in 2..={MAX_DIM}, got {}", self.d));
        }
        if self.n < self.d + 1 {
            return fail(format!("n must be at least d + 1 = {}, got {}", self.d + 1, self.n));
        }
        if self.replicates < 2 {
            return fail(format!("N must be at least 2, got {}", self.replicates));
        }
        if self.directions < 1 {
            return fail("M must be at least 1".into());
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return fail(format!("relTol must be in (0, 1), got {}", self.rel_tol));
        }
        if self.parallelism == Parallelism::Threads(0) {
            return fail("parallelism must be positive or \"auto\"".into());
        }
        Ok(())
    }
}
