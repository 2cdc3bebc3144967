//! Face counts of simplicial polytopes from their facet lists.
//!
//! Every `k`-face of a simplicial polytope is a `(k+1)`-subset of some facet,
//! so [`f_vector_from_facets`] counts distinct subsets. Each subset is counted
//! at its smallest vertex, enumerating only the facets in that vertex's star,
//! which keeps the deduplication local. [`pairwise_intersection_fvector`]
//! walks down the face lattice by intersecting pairs of faces one level up; it
//! is quadratic and kept as an independent check.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported dimension.
pub const MAX_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FVectorError {
    #[error("facet list is empty")]
    Empty,
    #[error("dimension {0} is outside the supported range 2..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("malformed facet {index}: {reason}")]
    MalformedFacet { index: usize, reason: String },
}

/// `(f_0, …, f_{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FVector(pub Vec<u64>);

impl FVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }

    /// `Σ (-1)^i f_i`.
    pub fn alternating_sum(&self) -> i128 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f as i128 } else { -(f as i128) })
            .sum()
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub euler_ok: bool,
    pub ridge_facet_ok: bool,
}

impl IdentityReport {
    pub fn all_ok(&self) -> bool {
        self.euler_ok && self.ridge_facet_ok
    }
}

/// Euler's relation and the ridge–facet count `2 f_{d-2} = d f_{d-1}`.
pub fn check_identities(f: &FVector) -> IdentityReport {
    let d = f.dim();
    if d == 0 {
        return IdentityReport {
            euler_ok: false,
            ridge_facet_ok: false,
        };
    }
    let euler_target: i128 = if d.is_multiple_of(2) { 0 } else { 2 };
    let ridge_facet_ok = if d >= 2 {
        2 * f.0[d - 2] as u128 == d as u128 * f.0[d - 1] as u128
    } else {
        true
    };
    IdentityReport {
        euler_ok: f.alternating_sum() == euler_target,
        ridge_facet_ok,
    }
}

fn validate(d: usize, facets: &[Vec<usize>]) -> Result<Vec<Vec<u32>>, FVectorError> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(FVectorError::UnsupportedDimension(d));
    }
    if facets.is_empty() {
        return Err(FVectorError::Empty);
    }
    facets
        .iter()
        .enumerate()
        .map(|(index, facet)| {
            let malformed = |reason: String| FVectorError::MalformedFacet { index, reason };
            if facet.len() != d {
                return Err(malformed(format!("expected {d} vertices, got {}", facet.len())));
            }
            let mut sorted = facet
                .iter()
                .map(|&v| u32::try_from(v).map_err(|_| malformed(format!("vertex {v} out of range"))))
                .collect::<Result<Vec<u32>, _>>()?;
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(malformed("duplicate vertex".into()));
            }
            Ok(sorted)
        })
        .collect()
}

/// f-vector by distinct-subset counting. `f_{d-1}` is the number of facets.
pub fn f_vector_from_facets(d: usize, facets: &[Vec<usize>]) -> Result<FVector, FVectorError> {
    let mut facets = validate(d, facets)?;

    // Relabel vertices 0..f_0 in increasing order so subset keys stay short.
    let mut labels: Vec<u32> = facets.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    for facet in &mut facets {
        for v in facet.iter_mut() {
            *v = labels.binary_search(v).expect("label of a facet vertex") as u32;
        }
    }
    let n_vertices = labels.len();
    let mut star: Vec<Vec<u32>> = vec![Vec::new(); n_vertices];
    for (fi, facet) in facets.iter().enumerate() {
        for &v in facet {
            star[v as usize].push(fi as u32);
        }
    }

    let mut counts = vec![0u64; d];
    counts[0] = n_vertices as u64;
    counts[d - 1] = facets.len() as u64;
    let bits = (u32::BITS - (n_vertices as u32).leading_zeros()).max(1) as usize;
    if bits * (d - 2) <= 64 {
        count_at_smallest_vertex(&facets, &star, &mut counts, |above, mask| {
            let mut key = 0u64;
            for (bit, &u) in above.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    key = (key << bits) | u as u64;
                }
            }
            key
        });
    } else if bits * (d - 2) <= 128 {
        count_at_smallest_vertex(&facets, &star, &mut counts, |above, mask| {
            let mut key = 0u128;
            for (bit, &u) in above.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    key = (key << bits) | u as u128;
                }
            }
            key
        });
    } else {
        count_at_smallest_vertex(&facets, &star, &mut counts, |above, mask| {
            let mut key = [u32::MAX; MAX_DIM];
            let mut slot = 0;
            for (bit, &u) in above.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    key[slot] = u;
                    slot += 1;
                }
            }
            key
        });
    }
    Ok(FVector(counts))
}

/// Adds to `counts[|S| - 1]` the distinct subsets `S = {v} ∪ T` with
/// `2 ≤ |S| ≤ d - 1`, each counted at its smallest vertex `v`. `key` encodes
/// the subset `T` of `above` selected by `mask`; keys are only compared
/// within one size class.
fn count_at_smallest_vertex<K: Ord>(
    facets: &[Vec<u32>],
    star: &[Vec<u32>],
    counts: &mut [u64],
    key: impl Fn(&[u32], u32) -> K,
) {
    let d = counts.len();
    let mut by_size: Vec<Vec<K>> = (0..d - 1).map(|_| Vec::new()).collect();
    for (v, facet_ids) in star.iter().enumerate() {
        by_size.iter_mut().for_each(Vec::clear);
        for &fi in facet_ids {
            let facet = &facets[fi as usize];
            let pos = facet.binary_search(&(v as u32)).expect("vertex in its star");
            let above = &facet[pos + 1..];
            // |S| ≤ d - 1, so |T| ≤ d - 2.
            for mask in 1u32..(1 << above.len()) {
                let size = mask.count_ones() as usize;
                if size <= d - 2 {
                    by_size[size].push(key(above, mask));
                }
            }
        }
        for (size, keys) in by_size.iter_mut().enumerate().skip(1) {
            keys.sort_unstable();
            keys.dedup();
            counts[size] += keys.len() as u64;
        }
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// f-vector by inductive pairwise intersection: the `(k)`-faces are the
/// distinct size-`(k+1)` intersections of pairs of `(k+1)`-faces.
pub fn pairwise_intersection_fvector(
    d: usize,
    facets: &[Vec<usize>],
) -> Result<FVector, FVectorError> {
    let facets = validate(d, facets)?;
    let mut counts = vec![0u64; d];
    counts[d - 1] = facets.len() as u64;

    let mut level: Vec<Vec<u32>> = facets;
    for k in (0..d - 1).rev() {
        let mut next: BTreeSet<Vec<u32>> = BTreeSet::new();
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let common = intersect(&level[i], &level[j]);
                if common.len() == k + 1 {
                    next.insert(common);
                }
            }
        }
        counts[k] = next.len() as u64;
        level = next.into_iter().collect();
    }
    Ok(FVector(counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn tetrahedron() -> Vec<Vec<usize>> {
        (0..4).combinations(3).collect()
    }

    fn octahedron() -> Vec<Vec<usize>> {
        // vertices 2a, 2a+1 are ±e_a; a facet picks one sign per axis
        (0..8)
            .map(|signs: usize| (0..3).map(|a| 2 * a + ((signs >> a) & 1)).collect())
            .collect()
    }

    #[test]
    fn simplex_counts() {
        assert_eq!(f_vector_from_facets(3, &tetrahedron()).unwrap().0, vec![4, 6, 4]);
        assert_eq!(
            pairwise_intersection_fvector(3, &tetrahedron()).unwrap().0,
            vec![4, 6, 4]
        );
    }

    #[test]
    fn octahedron_counts() {
        assert_eq!(f_vector_from_facets(3, &octahedron()).unwrap().0, vec![6, 12, 8]);
        assert_eq!(
            pairwise_intersection_fvector(3, &octahedron()).unwrap().0,
            vec![6, 12, 8]
        );
    }

    #[test]
    fn polygon_counts() {
        for m in 3..12usize {
            let edges: Vec<Vec<usize>> = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
            let f = f_vector_from_facets(2, &edges).unwrap();
            assert_eq!(f.0, vec![m as u64, m as u64]);
            assert_eq!(pairwise_intersection_fvector(2, &edges).unwrap(), f);
        }
    }

    #[test]
    fn cross_polytope_in_higher_dimensions() {
        // boundary of the d-dimensional cross-polytope: f_k = 2^{k+1} C(d, k+1)
        for d in 2..=6usize {
            let facets: Vec<Vec<usize>> = (0..1usize << d)
                .map(|signs| (0..d).map(|a| 2 * a + ((signs >> a) & 1)).collect())
                .collect();
            let f = f_vector_from_facets(d, &facets).unwrap();
            for k in 0..d {
                let binom = (0..k + 1).fold(1u64, |acc, i| acc * (d - i) as u64 / (i + 1) as u64);
                assert_eq!(f.0[k], (1u64 << (k + 1)) * binom, "d={d} k={k}");
            }
            assert!(check_identities(&f).all_ok());
        }
    }

    #[test]
    fn identities() {
        let r = check_identities(&FVector(vec![4, 6, 4]));
        assert!(r.euler_ok && r.ridge_facet_ok);
        assert!(check_identities(&FVector(vec![6, 12, 8])).all_ok());
        assert!(check_identities(&FVector(vec![5, 9, 6])).all_ok());
        let bad = check_identities(&FVector(vec![5, 9, 7]));
        assert!(!bad.euler_ok && !bad.ridge_facet_ok);
        // 4-simplex: 5 - 10 + 10 - 5 = 0
        assert!(check_identities(&FVector(vec![5, 10, 10, 5])).all_ok());
    }

    #[test]
    fn unsorted_facets_are_canonicalized() {
        let facets: Vec<Vec<usize>> = tetrahedron().into_iter().map(|mut f| {
            f.reverse();
            f
        }).collect();
        assert_eq!(f_vector_from_facets(3, &facets).unwrap().0, vec![4, 6, 4]);
    }

    #[test]
    fn malformed_input() {
        assert_eq!(f_vector_from_facets(3, &[]), Err(FVectorError::Empty));
        assert!(matches!(
            f_vector_from_facets(3, &[vec![0, 1]]),
            Err(FVectorError::MalformedFacet { index: 0, .. })
        ));
        assert!(matches!(
            pairwise_intersection_fvector(3, &[vec![0, 1, 2], vec![0, 1, 1]]),
            Err(FVectorError::MalformedFacet { index: 1, .. })
        ));
        assert_eq!(
            f_vector_from_facets(1, &[vec![0]]),
            Err(FVectorError::UnsupportedDimension(1))
        );
    }
}
