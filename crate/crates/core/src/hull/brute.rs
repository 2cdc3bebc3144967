use std::collections::BTreeSet;

use itertools::Itertools;

use super::geometry::plane_through;
use super::{HullError, Tolerance};
use crate::sampler::PointCloud;

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 16;

/// Facets of the hull of `cloud` by exhaustive enumeration of `d`-subsets,
/// with the default size cap.
pub fn brute_force_facets(
    cloud: &PointCloud,
    tol: &Tolerance,
) -> Result<BTreeSet<Vec<usize>>, HullError> {
    brute_force_facets_capped(cloud, tol, DEFAULT_BRUTE_FORCE_CAP)
}

/// A `d`-subset is a facet iff every other point lies strictly on one side of
/// its affine hull. Points on a supporting hyperplane are an error. `O(C(n, d) · n)`.
pub fn brute_force_facets_capped(
    cloud: &PointCloud,
    tol: &Tolerance,
    cap: usize,
) -> Result<BTreeSet<Vec<usize>>, HullError> {
    let d = cloud.dim();
    let n = cloud.len();
    if d < 2 {
        return Err(HullError::InvalidDimension(d));
    }
    if n > cap {
        return Err(HullError::TooManyPoints { cap, got: n });
    }
    if n < d + 1 {
        return Err(HullError::InsufficientPoints {
            needed: d + 1,
            got: n,
        });
    }
    let eps = tol.absolute_for(cloud);

    let mut facets = BTreeSet::new();
    for subset in (0..n).combinations(d) {
        let pts: Vec<&[f64]> = subset.iter().map(|&i| cloud.point(i)).collect();
        // A dependent subset spans no hyperplane. If its points lie on a
        // facet, an independent subset of that facet reports the incidence.
        let Ok(plane) = plane_through(&pts, None, eps) else {
            continue;
        };
        let (mut above, mut below) = (0usize, 0usize);
        let mut incident = None;
        for (i, p) in cloud.points().enumerate() {
            if subset.binary_search(&i).is_ok() {
                continue;
            }
            let dist = plane.signed_distance(p);
            if dist > eps {
                above += 1;
            } else if dist < -eps {
                below += 1;
            } else {
                incident.get_or_insert(i);
            }
        }
        if above == 0 || below == 0 {
            if let Some(i) = incident {
                return Err(HullError::DegenerateInput(format!(
                    "point {i} is incident to the supporting hyperplane through {subset:?}"
                )));
            }
            facets.insert(subset);
        }
    }
    Ok(facets)
}
