//! Random-projection Kolmogorov distance to the standard normal.
//!
//! Whitened data are projected onto `M` uniformly random unit directions; each
//! projection is compared with `Φ` by the exact Kolmogorov distance of its
//! empirical CDF, and `D_K` is the largest of the `M` distances.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rng::{make_stream, Purpose, RngStream, Seed, StreamKey};
use crate::stats::SampleMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussTestError {
    #[error("empty sample")]
    EmptySample,
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("direction count must be at least 1")]
    NoDirections,
    #[error("non-finite projection value")]
    NonFinite,
}

/// Unit vector in `R^p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction(pub Vec<f64>);

impl Direction {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn project(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Uniform direction on `S^{p-1}`: `p` standard normals, normalized. An
/// all-zero draw is redrawn.
pub fn random_direction(stream: &mut RngStream, p: usize) -> Result<Direction, GaussTestError> {
    if p == 0 {
        return Err(GaussTestError::InvalidDimension);
    }
    loop {
        let v: Vec<f64> = (0..p).map(|_| stream.standard_normal()).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 0.0 {
            return Ok(Direction(v.into_iter().map(|x| x / len).collect()));
        }
    }
}

/// The `index`-th direction of the run keyed by `seed`.
pub fn direction_for(seed: Seed, index: usize, p: usize) -> Result<Direction, GaussTestError> {
    let mut stream = make_stream(StreamKey::new(seed, index as u64, Purpose::Directions));
    random_direction(&mut stream, p)
}

/// Standard normal CDF `Φ(t) = ½ erfc(-t/√2)`, clamped to 0 or 1 beyond ±8.3.
pub fn normal_cdf(t: f64) -> f64 {
    if t <= -8.3 {
        0.0
    } else if t >= 8.3 {
        1.0
    } else {
        0.5 * libm::erfc(-t / std::f64::consts::SQRT_2)
    }
}

/// `sup_t |F_N(t) - Φ(t)|` over the step ECDF, via order statistics.
/// Sorts `values` in place.
pub fn ks_distance_in_place(values: &mut [f64]) -> Result<f64, GaussTestError> {
    if values.is_empty() {
        return Err(GaussTestError::EmptySample);
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(GaussTestError::NonFinite);
    }
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut worst: f64 = 0.0;
    for (j, &x) in values.iter().enumerate() {
        let phi = normal_cdf(x);
        let above = (j + 1) as f64 / n - phi;
        let below = phi - j as f64 / n;
        worst = worst.max(above.abs()).max(below.abs());
    }
    Ok(worst)
}

pub fn ks_distance(values: &[f64]) -> Result<f64, GaussTestError> {
    ks_distance_in_place(&mut values.to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KsResult {
    pub m: usize,
    pub seed: Seed,
    pub per_direction: Vec<f64>,
    pub argmax: usize,
    pub d_k: f64,
}

impl KsResult {
    /// Indices of the `k` largest per-direction distances, worst first.
    pub fn worst(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.per_direction.len()).collect();
        idx.sort_by(|&a, &b| {
            self.per_direction[b]
                .total_cmp(&self.per_direction[a])
                .then(a.cmp(&b))
        });
        idx.truncate(k);
        idx
    }

    /// Empirical quantile (nearest rank) of the per-direction distances.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut sorted = self.per_direction.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        let rank = ((q.clamp(0.0, 1.0) * sorted.len() as f64).ceil() as usize).max(1);
        sorted[rank - 1]
    }
}

/// `D_K` over `m` directions. Direction `i` is drawn from the stream keyed by
/// `(seed, i, Directions)`, so the result does not depend on scheduling and a
/// run with more directions extends the same direction sequence.
pub fn dk_statistic(
    whitened: &SampleMatrix,
    m: usize,
    seed: Seed,
) -> Result<KsResult, GaussTestError> {
    if whitened.is_empty() {
        return Err(GaussTestError::EmptySample);
    }
    if m == 0 {
        return Err(GaussTestError::NoDirections);
    }
    let p = whitened.dim();
    let n = whitened.len();
    let per_direction = (0..m)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, i| {
                let dir = direction_for(seed, i, p)?;
                for (slot, row) in buf.iter_mut().zip(whitened.rows()) {
                    *slot = dir.project(row);
                }
                ks_distance_in_place(buf)
            },
        )
        .collect::<Result<Vec<f64>, _>>()?;

    let (argmax, d_k) = per_direction
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    Ok(KsResult {
        m,
        seed,
        per_direction,
        argmax,
        d_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_basics() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-9);
        for t in [0.1, 0.7, 1.3, 2.5, 4.0, 6.5] {
            assert!((normal_cdf(-t) - (1.0 - normal_cdf(t))).abs() < 1e-12);
        }
        assert_eq!(normal_cdf(9.0), 1.0);
        assert_eq!(normal_cdf(-9.0), 0.0);
    }

    #[test]
    fn single_sample_at_zero() {
        assert_eq!(ks_distance(&[0.0]).unwrap(), 0.5);
        assert_eq!(ks_distance(&[]), Err(GaussTestError::EmptySample));
        assert_eq!(ks_distance(&[f64::NAN]), Err(GaussTestError::NonFinite));
    }

    #[test]
    fn one_dimensional_directions_are_signs() {
        let mut plus = 0;
        for i in 0..2000 {
            let d = direction_for(Seed(3), i, 1).unwrap();
            assert!(d.0[0] == 1.0 || d.0[0] == -1.0);
            if d.0[0] > 0.0 {
                plus += 1;
            }
        }
        // 4σ around 1000
        assert!((plus as f64 - 1000.0).abs() < 4.0 * 500f64.sqrt(), "{plus}");
    }

    #[test]
    fn mean_direction_is_small() {
        let draws = 100_000;
        let mut mean = [0.0; 3];
        for i in 0..draws {
            let d = direction_for(Seed(4), i, 3).unwrap();
            for (m, x) in mean.iter_mut().zip(&d.0) {
                *m += x / draws as f64;
            }
        }
        let norm = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm <= 0.013, "{norm}");
    }

    #[test]
    fn planar_angles_are_uniform() {
        let draws = 100_000;
        let mut angles: Vec<f64> = (0..draws)
            .map(|i| {
                let d = direction_for(Seed(5), i, 2).unwrap();
                d.0[1].atan2(d.0[0]).rem_euclid(std::f64::consts::TAU)
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let n = draws as f64;
        let mut worst: f64 = 0.0;
        for (j, a) in angles.iter().enumerate() {
            let cdf = a / std::f64::consts::TAU;
            worst = worst.max(((j + 1) as f64 / n - cdf).abs()).max((cdf - j as f64 / n).abs());
        }
        assert!(worst <= 0.0062, "{worst}");
    }

    #[test]
    fn directions_are_unit() {
        for p in 1..8 {
            let d = direction_for(Seed(6), p, p).unwrap();
            let len = d.0.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((len - 1.0).abs() < 1e-12);
        }
        let mut s = make_stream(StreamKey::new(Seed(6), 0, Purpose::Other));
        assert_eq!(random_direction(&mut s, 0), Err(GaussTestError::InvalidDimension));
    }

    #[test]
    fn quantiles_and_worst() {
        let r = KsResult {
            m: 4,
            seed: Seed(0),
            per_direction: vec![0.1, 0.4, 0.2, 0.3],
            argmax: 1,
            d_k: 0.4,
        };
        assert_eq!(r.worst(2), vec![1, 3]);
        assert_eq!(r.quantile(0.0), 0.1);
        assert_eq!(r.quantile(0.5), 0.2);
        assert_eq!(r.quantile(1.0), 0.4);
    }

    #[test]
    fn rejects_empty_inputs() {
        let empty = SampleMatrix::new(2, vec![]).unwrap();
        assert_eq!(dk_statistic(&empty, 10, Seed(1)), Err(GaussTestError::EmptySample));
        let one = SampleMatrix::new(2, vec![0.0, 0.0]).unwrap();
        assert_eq!(dk_statistic(&one, 0, Seed(1)), Err(GaussTestError::NoDirections));
    }
}
