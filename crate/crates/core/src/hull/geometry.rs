//! Hyperplanes through `d` points and the sidedness predicate built on them.

use super::{HullError, Tolerance};

/// Oriented hyperplane `⟨normal, x⟩ = offset` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Plane {
    #[inline]
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

/// Position of a query point relative to an oriented hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
    Incident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PlaneError {
    /// The defining points are affinely dependent within tolerance.
    RankDeficient,
    /// The orientation reference lies on the hyperplane.
    ReferenceIncident,
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes from `v` its components along the orthonormal `basis`.
/// Two Gram–Schmidt passes keep the residual orthogonal to working precision.
pub(crate) fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Orthonormal basis of the directions `pts[i] - pts[0]`, or `None` when some
/// point lies within `eps` of the affine hull of its predecessors.
pub(crate) fn span_basis(pts: &[&[f64]], eps: f64) -> Option<Vec<Vec<f64>>> {
    let origin = pts[0];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(pts.len().saturating_sub(1));
    for p in &pts[1..] {
        let mut v = diff(p, origin);
        orthogonalize(&mut v, &basis);
        let len = norm(&v);
        if len <= eps {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= len);
        basis.push(v);
    }
    Some(basis)
}

/// Hyperplane through the `d` points `pts` in `R^d`.
///
/// With a `reference` point the normal is oriented so the reference lies
/// strictly below. Without one the sign is arbitrary.
pub(crate) fn plane_through(
    pts: &[&[f64]],
    reference: Option<&[f64]>,
    eps: f64,
) -> Result<Plane, PlaneError> {
    let d = pts[0].len();
    debug_assert_eq!(pts.len(), d);
    let normal = match reference {
        Some(r) => {
            let mut normal = vec![0.0; d];
            let offset = oriented_plane_into(pts, r, eps, &mut PlaneScratch::new(d), &mut normal)?;
            return Ok(Plane { normal, offset });
        }
        None => {
            let basis = span_basis(pts, eps).ok_or(PlaneError::RankDeficient)?;
            // Residual of the coordinate axis least aligned with the span.
            let mut best: Option<(f64, Vec<f64>)> = None;
            for axis in 0..d {
                let mut w = vec![0.0; d];
                w[axis] = 1.0;
                orthogonalize(&mut w, &basis);
                let len = norm(&w);
                if best.as_ref().is_none_or(|(l, _)| len > *l) {
                    best = Some((len, w));
                }
            }
            let (len, w) = best.expect("d >= 1");
            w.iter().map(|x| x / len).collect::<Vec<f64>>()
        }
    };

    let offset = pts.iter().map(|p| dot(&normal, p)).sum::<f64>() / d as f64;
    Ok(Plane { normal, offset })
}

/// Reusable buffers for [`oriented_plane_into`] above the unrolled sizes.
pub(crate) struct PlaneScratch {
    rows: Vec<f64>,
    pivots: Vec<usize>,
}

impl PlaneScratch {
    pub(crate) fn new(d: usize) -> Self {
        PlaneScratch {
            rows: vec![0.0; d * d],
            pivots: vec![0; d],
        }
    }
}

/// Allocation-free [`plane_through`] with a reference point: writes the unit
/// normal of the hyperplane through `pts` into `normal` and returns the offset.
pub(crate) fn oriented_plane_into(
    pts: &[&[f64]],
    reference: &[f64],
    eps: f64,
    scratch: &mut PlaneScratch,
    normal: &mut [f64],
) -> Result<f64, PlaneError> {
    match reference.len() {
        2 => oriented_plane_fixed::<2>(pts, reference, eps, normal),
        3 => oriented_plane_fixed::<3>(pts, reference, eps, normal),
        4 => oriented_plane_fixed::<4>(pts, reference, eps, normal),
        5 => oriented_plane_fixed::<5>(pts, reference, eps, normal),
        6 => oriented_plane_fixed::<6>(pts, reference, eps, normal),
        7 => oriented_plane_fixed::<7>(pts, reference, eps, normal),
        8 => oriented_plane_fixed::<8>(pts, reference, eps, normal),
        d => oriented_plane_core(
            pts,
            reference,
            eps,
            d,
            &mut scratch.rows,
            &mut scratch.pivots,
            normal,
        ),
    }
}

/// Plane of a cone facet built over the ridge shared by a visible facet
/// (normal `n_visible`) and a horizon facet (normal `n_horizon`). The ridge's
/// normal space is spanned by the two normals, so the facet normal is
/// `a·n_horizon + b·n_visible` with `a`, `b` the apex distances above the
/// visible facet and below the horizon facet. Returns `None` if the
/// combination degenerates or some vertex in `pts` is off the result by more
/// than `tol`; the caller then solves for the plane from scratch.
pub(crate) fn cone_plane_into(
    n_visible: &[f64],
    above_visible: f64,
    n_horizon: &[f64],
    below_horizon: f64,
    pts: &[&[f64]],
    tol: f64,
    normal: &mut [f64],
) -> Option<f64> {
    let (a, b) = (above_visible, below_horizon);
    match normal.len() {
        2 => cone_plane_fixed::<2>(n_visible, a, n_horizon, b, pts, tol, normal),
        3 => cone_plane_fixed::<3>(n_visible, a, n_horizon, b, pts, tol, normal),
        4 => cone_plane_fixed::<4>(n_visible, a, n_horizon, b, pts, tol, normal),
        5 => cone_plane_fixed::<5>(n_visible, a, n_horizon, b, pts, tol, normal),
        6 => cone_plane_fixed::<6>(n_visible, a, n_horizon, b, pts, tol, normal),
        7 => cone_plane_fixed::<7>(n_visible, a, n_horizon, b, pts, tol, normal),
        8 => cone_plane_fixed::<8>(n_visible, a, n_horizon, b, pts, tol, normal),
        _ => {
            let mut len = 0.0;
            for ((n, h), v) in normal.iter_mut().zip(n_horizon).zip(n_visible) {
                *n = a * h + b * v;
                len += *n * *n;
            }
            let len = len.sqrt();
            if len.is_nan() || len <= 1e-8 * (a + b) {
                return None;
            }
            normal.iter_mut().for_each(|x| *x /= len);
            let heights = pts.iter().map(|p| dot(normal, p));
            let (lo, hi, sum) = heights.fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, sum), h| {
                (lo.min(h), hi.max(h), sum + h)
            });
            (hi - lo <= tol).then(|| sum / pts.len() as f64)
        }
    }
}

fn cone_plane_fixed<const D: usize>(
    n_visible: &[f64],
    a: f64,
    n_horizon: &[f64],
    b: f64,
    pts: &[&[f64]],
    tol: f64,
    normal: &mut [f64],
) -> Option<f64> {
    let v: &[f64; D] = n_visible.try_into().expect("normal of dimension D");
    let h: &[f64; D] = n_horizon.try_into().expect("normal of dimension D");
    let pts: &[&[f64]; D] = pts.try_into().expect("D points");
    let mut n = [0.0; D];
    let mut len = 0.0;
    for i in 0..D {
        n[i] = a * h[i] + b * v[i];
        len += n[i] * n[i];
    }
    let len = len.sqrt();
    if len.is_nan() || len <= 1e-8 * (a + b) {
        return None;
    }
    for x in &mut n {
        *x /= len;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for p in pts {
        let p: &[f64; D] = (*p).try_into().expect("point of dimension D");
        let mut t = 0.0;
        for i in 0..D {
            t += n[i] * p[i];
        }
        if t < lo {
            lo = t;
        }
        if t > hi {
            hi = t;
        }
        sum += t;
    }
    if hi - lo > tol {
        return None;
    }
    normal.copy_from_slice(&n);
    Some(sum / D as f64)
}

/// [`oriented_plane_core`] on stack arrays, unrolled for each `D`.
fn oriented_plane_fixed<const D: usize>(
    pts: &[&[f64]],
    reference: &[f64],
    eps: f64,
    normal: &mut [f64],
) -> Result<f64, PlaneError> {
    let point = |p: &[f64]| -> [f64; D] { p.try_into().expect("point of dimension D") };
    let origin = point(pts[0]);
    let m = D - 1;
    let mut rows = [[0.0; D]; D];
    for r in 0..m {
        let p = point(pts[r + 1]);
        for c in 0..D {
            rows[r][c] = p[c] - origin[c];
        }
    }

    let mut pivots = [0; D];
    let mut free = D;
    let mut rank = 0;
    for c in 0..D {
        if rank == m {
            if free == D {
                free = c;
            }
            break;
        }
        let mut best = rank;
        for r in rank + 1..m {
            if rows[r][c].abs() > rows[best][c].abs() {
                best = r;
            }
        }
        if rows[best][c].abs() <= eps {
            if free != D {
                return Err(PlaneError::RankDeficient);
            }
            free = c;
            continue;
        }
        rows.swap(best, rank);
        let pivot_row = rows[rank];
        // Columns left of c are never read again, except a free one.
        for row in rows[rank + 1..m].iter_mut() {
            let f = row[c] / pivot_row[c];
            if free < c {
                row[free] -= f * pivot_row[free];
            }
            for j in c + 1..D {
                row[j] -= f * pivot_row[j];
            }
        }
        pivots[rank] = c;
        rank += 1;
    }
    if rank < m || free == D {
        return Err(PlaneError::RankDeficient);
    }

    let mut n = [0.0; D];
    n[free] = 1.0;
    for r in (0..m).rev() {
        let c = pivots[r];
        let row = &rows[r];
        let mut s = if free < c { row[free] } else { 0.0 };
        for j in c + 1..D {
            s += row[j] * n[j];
        }
        n[c] = -s / row[c];
    }
    let r = point(reference);
    let mut len = 0.0;
    for x in n {
        len += x * x;
    }
    let len = len.sqrt();
    let mut side = 0.0;
    for i in 0..D {
        n[i] /= len;
        side += n[i] * (r[i] - origin[i]);
    }
    if side.abs() <= eps {
        return Err(PlaneError::ReferenceIncident);
    }
    if side > 0.0 {
        n.iter_mut().for_each(|x| *x = -*x);
    }
    let mut offset = 0.0;
    for p in pts {
        let p = point(p);
        for i in 0..D {
            offset += n[i] * p[i];
        }
    }
    normal.copy_from_slice(&n);
    Ok(offset / D as f64)
}

/// Null vector of the `(d-1) × d` matrix of edge vectors `pts[i] - pts[0]`
/// by Gaussian elimination with partial pivoting. A column whose best pivot
/// is at most `eps` is free; more than one free column means the points are
/// affinely dependent.
fn oriented_plane_core(
    pts: &[&[f64]],
    reference: &[f64],
    eps: f64,
    d: usize,
    rows: &mut [f64],
    pivots: &mut [usize],
    normal: &mut [f64],
) -> Result<f64, PlaneError> {
    let origin = pts[0];
    let m = d - 1;
    for r in 0..m {
        for c in 0..d {
            rows[r * d + c] = pts[r + 1][c] - origin[c];
        }
    }

    let mut free = d;
    let mut rank = 0;
    for c in 0..d {
        if rank == m {
            if free == d {
                free = c;
            }
            break;
        }
        let mut best = rank;
        for r in rank + 1..m {
            if rows[r * d + c].abs() > rows[best * d + c].abs() {
                best = r;
            }
        }
        if rows[best * d + c].abs() <= eps {
            if free != d {
                return Err(PlaneError::RankDeficient);
            }
            free = c;
            continue;
        }
        if best != rank {
            for j in 0..d {
                rows.swap(best * d + j, rank * d + j);
            }
        }
        let pivot = rows[rank * d + c];
        for r in rank + 1..m {
            let f = rows[r * d + c] / pivot;
            if f != 0.0 {
                for j in c..d {
                    rows[r * d + j] -= f * rows[rank * d + j];
                }
            }
        }
        pivots[rank] = c;
        rank += 1;
    }
    if rank < m || free == d {
        return Err(PlaneError::RankDeficient);
    }

    normal.fill(0.0);
    normal[free] = 1.0;
    for r in (0..m).rev() {
        let c = pivots[r];
        // Unsolved pivot columns are still zero in `normal`.
        let mut s = 0.0;
        for j in (0..d).filter(|&j| j != c) {
            s += rows[r * d + j] * normal[j];
        }
        normal[c] = -s / rows[r * d + c];
    }
    let len = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut side = 0.0;
    for (n, (r, o)) in normal.iter_mut().zip(reference.iter().zip(origin)) {
        *n /= len;
        side += *n * (r - o);
    }
    if side.abs() <= eps {
        return Err(PlaneError::ReferenceIncident);
    }
    if side > 0.0 {
        normal.iter_mut().for_each(|n| *n = -*n);
    }
    Ok(pts.iter().map(|p| dot(normal, p)).sum::<f64>() / d as f64)
}

pub(crate) fn classify(dist: f64, eps: f64) -> Side {
    if dist > eps {
        Side::Above
    } else if dist < -eps {
        Side::Below
    } else {
        Side::Incident
    }
}

/// Side of `query` relative to the hyperplane through `simplex`, oriented so
/// that `apex` is below. `Incident` when the distance is at most the absolute
/// tolerance.
pub fn orientation(
    simplex: &[&[f64]],
    apex: &[f64],
    query: &[f64],
    tol: &Tolerance,
) -> Result<Side, HullError> {
    let d = apex.len();
    if d < 2 {
        return Err(HullError::InvalidDimension(d));
    }
    if simplex.len() != d || simplex.iter().any(|p| p.len() != d) || query.len() != d {
        return Err(HullError::DimensionMismatch);
    }
    let scale = tol.scale.unwrap_or_else(|| {
        simplex
            .iter()
            .copied()
            .chain([apex, query])
            .flatten()
            .fold(0.0f64, |m, c| m.max(c.abs()))
    });
    let eps = tol.rel_eps * scale;
    let plane = plane_through(simplex, Some(apex), eps).map_err(|_| HullError::RankDeficient)?;
    Ok(classify(plane.signed_distance(query), eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_through_origin() {
        let tol = Tolerance::default();
        let simplex: [&[f64]; 2] = [&[0.0, 0.0], &[1.0, 0.0]];
        let apex = [0.0, -1.0];
        assert_eq!(
            orientation(&simplex, &apex, &[0.0, 1.0], &tol).unwrap(),
            Side::Above
        );
        assert_eq!(
            orientation(&simplex, &apex, &[0.5, 0.0], &tol).unwrap(),
            Side::Incident
        );
        assert_eq!(
            orientation(&simplex, &apex, &[3.0, -0.2], &tol).unwrap(),
            Side::Below
        );
    }

    #[test]
    fn dependent_simplex_is_rejected() {
        let tol = Tolerance::default();
        let simplex: [&[f64]; 3] = [&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]];
        assert_eq!(
            orientation(&simplex, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &tol),
            Err(HullError::RankDeficient)
        );
    }

    #[test]
    fn plane_is_unit_and_oriented() {
        let pts: [&[f64]; 3] = [&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]];
        let plane = plane_through(&pts, Some(&[0.0, 0.0, 0.0]), 1e-12).unwrap();
        assert!((norm(&plane.normal) - 1.0).abs() < 1e-12);
        let expected = 1.0 / 3f64.sqrt();
        for c in &plane.normal {
            assert!((c - expected).abs() < 1e-12);
        }
        assert!((plane.offset - expected).abs() < 1e-12);
        for p in pts {
            assert!(plane.signed_distance(p).abs() < 1e-12);
        }
    }

    #[test]
    fn unoriented_plane_contains_points() {
        let pts: [&[f64]; 2] = [&[0.3, 0.1], &[-0.7, 0.9]];
        let plane = plane_through(&pts, None, 1e-12).unwrap();
        for p in pts {
            assert!(plane.signed_distance(p).abs() < 1e-14);
        }
        assert!((norm(&plane.normal) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unrolled_and_general_planes_agree() {
        use crate::rng::{make_stream, Purpose, Seed, StreamKey};
        for d in 2..=8 {
            let mut s = make_stream(StreamKey::new(Seed(5), d as u64, Purpose::Other));
            let coords: Vec<Vec<f64>> = (0..=d)
                .map(|_| (0..d).map(|_| s.standard_normal()).collect())
                .collect();
            let pts: Vec<&[f64]> = coords[..d].iter().map(Vec::as_slice).collect();
            let reference = &coords[d];
            let mut fixed = vec![0.0; d];
            let mut general = vec![0.0; d];
            let a = oriented_plane_into(&pts, reference, 1e-12, &mut PlaneScratch::new(d), &mut fixed)
                .unwrap();
            let b = oriented_plane_core(
                &pts,
                reference,
                1e-12,
                d,
                &mut vec![0.0; d * d],
                &mut vec![0; d],
                &mut general,
            )
            .unwrap();
            assert!((a - b).abs() < 1e-12, "d={d}");
            for (x, y) in fixed.iter().zip(&general) {
                assert!((x - y).abs() < 1e-12, "d={d}");
            }
            for p in &pts {
                assert!((dot(&fixed, p) - a).abs() < 1e-10);
            }
            assert!(dot(&fixed, reference) < a);
        }
    }

    #[test]
    fn cone_plane_matches_direct_solve() {
        use crate::rng::{make_stream, Purpose, Seed, StreamKey};
        for d in 2..=8 {
            let mut s = make_stream(StreamKey::new(Seed(9), d as u64, Purpose::Other));
            let simplex: Vec<Vec<f64>> = (0..=d)
                .map(|_| (0..d).map(|_| s.standard_normal()).collect())
                .collect();
            let centroid: Vec<f64> = (0..d)
                .map(|c| simplex.iter().map(|p| p[c]).sum::<f64>() / (d + 1) as f64)
                .collect();
            let facet = |omit: usize| -> (Vec<f64>, f64) {
                let pts: Vec<&[f64]> = (0..=d).filter(|&i| i != omit).map(|i| simplex[i].as_slice()).collect();
                let mut n = vec![0.0; d];
                let o = oriented_plane_into(&pts, &centroid, 1e-12, &mut PlaneScratch::new(d), &mut n).unwrap();
                (n, o)
            };
            // Visible facet omits vertex 0, horizon facet omits vertex 1.
            let (nv, ov) = facet(0);
            let (nh, oh) = facet(1);
            let mid: Vec<f64> = (1..=d)
                .fold(vec![0.0; d], |acc, i| acc.iter().zip(&simplex[i]).map(|(a, x)| a + x / d as f64).collect());
            let apex: Vec<f64> = mid.iter().zip(&nv).map(|(m, n)| m + 1e-3 * n).collect();
            let (a, b) = (dot(&nv, &apex) - ov, oh - dot(&nh, &apex));
            assert!(a > 0.0 && b > 0.0, "d={d}");

            let mut pts: Vec<&[f64]> = (2..=d).map(|i| simplex[i].as_slice()).collect();
            pts.push(&apex);
            let mut direct = vec![0.0; d];
            let o = oriented_plane_into(&pts, &centroid, 1e-12, &mut PlaneScratch::new(d), &mut direct).unwrap();
            let mut cone = vec![0.0; d];
            let c = cone_plane_into(&nv, a, &nh, b, &pts, 1e-13, &mut cone).expect("accurate cone plane");
            assert!((c - o).abs() < 1e-12, "d={d}");
            for (x, y) in cone.iter().zip(&direct) {
                assert!((x - y).abs() < 1e-12, "d={d}");
            }

            let mut skewed = nv.clone();
            skewed[0] += 1e-3;
            assert!(cone_plane_into(&skewed, a, &nh, b, &pts, 1e-13, &mut cone).is_none());
            assert!(cone_plane_into(&nv, 0.0, &nh, 0.0, &pts, 1e-13, &mut cone).is_none());
        }
    }

    #[test]
    fn high_dimensional_plane() {
        let d = 10;
        let rows: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        let pts: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let plane = plane_through(&pts, Some(&vec![0.0; d]), 1e-12).unwrap();
        let expected = 1.0 / (d as f64).sqrt();
        assert!(plane.normal.iter().all(|c| (c - expected).abs() < 1e-12));
    }
}
