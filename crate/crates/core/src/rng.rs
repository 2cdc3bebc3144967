//! Seedable, splittable random streams.
//!
//! Every stream is a ChaCha12 generator. The 256-bit key is assembled from the
//! master seed, the purpose tag and the sub-stream index; the replicate index
//! selects the ChaCha stream word. The mapping from [`StreamKey`] to generator
//! state is therefore injective and a pure function of the key, so distinct
//! keys never share state and any schedule of replicates reproduces the same
//! bits.
//!
//! Variate recipes (fixed, so output files are reproducible):
//!
//! * `uniform`: one `u64`, top 53 bits, value in `[0, 1)`.
//! * `open_uniform`: one `u64`, top 53 bits plus one half ulp, value in `(0, 1)`.
//! * `standard_normal`: Box–Muller cosine branch, exactly two `u64` per variate
//!   (`open_uniform` for the radius, `uniform` for the angle).
//! * `laplace`: inverse CDF of the density `½e^{-|x|}` from one `open_uniform`.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

const KEY_DOMAIN: &[u8; 16] = b"randpoly-stream\0";
const INV_2_53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// Master seed of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// What a stream is used for. Streams with different purposes are independent
/// even when they share the master seed and replicate index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Points,
    Directions,
    Other,
}

impl Purpose {
    fn tag(self) -> u32 {
        match self {
            Purpose::Points => 1,
            Purpose::Directions => 2,
            Purpose::Other => 3,
        }
    }
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master: Seed,
    pub replicate: u64,
    pub purpose: Purpose,
    /// Fresh sub-stream index, used when a replicate has to be redrawn.
    pub substream: u32,
}

impl StreamKey {
    pub fn new(master: Seed, replicate: u64, purpose: Purpose) -> Self {
        StreamKey {
            master,
            replicate,
            purpose,
            substream: 0,
        }
    }

    pub fn with_substream(self, substream: u32) -> Self {
        StreamKey { substream, ..self }
    }
}

/// A single-owner stream of uniform bits and derived variates.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha12Rng,
}

/// Derives the generator for `key`.
pub fn make_stream(key: StreamKey) -> RngStream {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&key.master.0.to_le_bytes());
    seed[8..12].copy_from_slice(&key.purpose.tag().to_le_bytes());
    seed[12..16].copy_from_slice(&key.substream.to_le_bytes());
    seed[16..].copy_from_slice(KEY_DOMAIN);
    let mut inner = ChaCha12Rng::from_seed(seed);
    inner.set_stream(key.replicate);
    RngStream { inner }
}

impl RngStream {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * INV_2_53
    }

    /// Uniform double in the open interval `(0, 1)`.
    pub fn open_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * INV_2_53
    }

    /// One exact standard normal variate (Box–Muller, two uniforms per call).
    pub fn standard_normal(&mut self) -> f64 {
        let radius = (-2.0 * self.open_uniform().ln()).sqrt();
        let angle = std::f64::consts::TAU * self.uniform();
        radius * angle.cos()
    }

    /// One variate with density `½e^{-|x|}` (inverse CDF, one uniform per call).
    pub fn laplace(&mut self) -> f64 {
        let u = self.open_uniform();
        if u < 0.5 {
            (2.0 * u).ln()
        } else {
            -(2.0 * (1.0 - u)).ln()
        }
    }
}

/// Convenience for the one-shot standard normal draw.
pub fn standard_normal(stream: &mut RngStream) -> f64 {
    stream.standard_normal()
}
