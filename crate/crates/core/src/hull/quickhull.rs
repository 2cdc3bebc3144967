use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::geometry::{cone_plane_into, dot, norm, oriented_plane_into, orthogonalize, PlaneError, PlaneScratch};
use super::{Facet, HullDiagnostics, HullError, HullResult, Tolerance};
use crate::sampler::PointCloud;

const NO_FACE: u32 = u32::MAX;
/// Dimensions up to this size build planes without heap allocation.
const MAX_STACK_DIM: usize = 16;

/// Face storage is structure-of-arrays with stride `d`; slots of deleted
/// faces are recycled.
struct Builder<'a> {
    cloud: &'a PointCloud,
    d: usize,
    eps: f64,
    /// Strictly interior reference point (centroid of the initial simplex).
    interior: Vec<f64>,
    vertices: Vec<u32>,
    /// `neighbors[f * d + k]` shares the ridge opposite `vertices[f * d + k]`.
    neighbors: Vec<u32>,
    /// Cone face built over the horizon ridge `(f, k)` in the current step.
    cone_of: Vec<u32>,
    normals: Vec<f64>,
    offsets: Vec<f64>,
    outside: Vec<Vec<u32>>,
    furthest: Vec<(u32, f64)>,
    alive: Vec<bool>,
    stamp: Vec<usize>,
    visible: Vec<bool>,
    free: Vec<usize>,
    scratch: PlaneScratch,
    iteration: usize,
    diagnostics: HullDiagnostics,
}

/// Convex hull of `cloud` by incremental quickhull. The next apex is always
/// the furthest outside point over all faces.
///
/// Points within the absolute tolerance of a facet are treated as beneath it
/// when outside sets are formed. A point incident to a facet adjacent to the
/// visible region, or an affinely dependent initial simplex, aborts with
/// [`HullError::DegenerateInput`]; callers are expected to redraw the sample.
pub fn convex_hull(cloud: &PointCloud, tol: &Tolerance) -> Result<HullResult, HullError> {
    let d = cloud.dim();
    let n = cloud.len();
    if d < 2 {
        return Err(HullError::InvalidDimension(d));
    }
    if n < d + 1 {
        return Err(HullError::InsufficientPoints {
            needed: d + 1,
            got: n,
        });
    }
    let eps = tol.absolute_for(cloud);
    let mut builder = Builder::start(cloud, eps)?;
    builder.expand()?;
    Ok(builder.finish())
}

/// Picks `d + 1` affinely independent points: the farthest pair among the
/// coordinate-extreme points, then repeatedly the point farthest from the
/// affine hull of those chosen so far.
fn initial_simplex(cloud: &PointCloud, eps: f64) -> Result<Vec<usize>, HullError> {
    let d = cloud.dim();
    let mut extremes = Vec::with_capacity(2 * d);
    for axis in 0..d {
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in cloud.points().enumerate() {
            if p[axis] < cloud.point(lo)[axis] {
                lo = i;
            }
            if p[axis] > cloud.point(hi)[axis] {
                hi = i;
            }
        }
        extremes.push(lo);
        extremes.push(hi);
    }
    let mut pair = (extremes[0], extremes[1]);
    let mut best = -1.0;
    for (i, &a) in extremes.iter().enumerate() {
        for &b in &extremes[i + 1..] {
            let dist: f64 = cloud
                .point(a)
                .iter()
                .zip(cloud.point(b))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            if dist > best {
                best = dist;
                pair = (a, b);
            }
        }
    }

    let origin = cloud.point(pair.0);
    let mut chosen = vec![pair.0];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut candidate = pair.1;
    loop {
        let mut v: Vec<f64> = cloud
            .point(candidate)
            .iter()
            .zip(origin)
            .map(|(x, y)| x - y)
            .collect();
        orthogonalize(&mut v, &basis);
        let len = norm(&v);
        if len <= eps {
            return Err(HullError::DegenerateInput(format!(
                "initial simplex has rank {} < {d}",
                basis.len()
            )));
        }
        v.iter_mut().for_each(|x| *x /= len);
        basis.push(v);
        chosen.push(candidate);
        if chosen.len() == d + 1 {
            return Ok(chosen);
        }

        let mut far = 0.0;
        for (i, p) in cloud.points().enumerate() {
            let mut w: Vec<f64> = p.iter().zip(origin).map(|(x, y)| x - y).collect();
            orthogonalize(&mut w, &basis);
            let len = norm(&w);
            if len > far {
                far = len;
                candidate = i;
            }
        }
    }
}

impl<'a> Builder<'a> {
    fn start(cloud: &'a PointCloud, eps: f64) -> Result<Self, HullError> {
        let d = cloud.dim();
        let simplex = initial_simplex(cloud, eps)?;
        let mut interior = vec![0.0; d];
        for &i in &simplex {
            for (c, x) in interior.iter_mut().zip(cloud.point(i)) {
                *c += x / (d + 1) as f64;
            }
        }

        let mut builder = Builder {
            cloud,
            d,
            eps,
            interior,
            vertices: Vec::new(),
            neighbors: Vec::new(),
            cone_of: Vec::new(),
            normals: Vec::new(),
            offsets: Vec::new(),
            outside: Vec::new(),
            furthest: Vec::new(),
            alive: Vec::new(),
            stamp: Vec::new(),
            visible: Vec::new(),
            free: Vec::new(),
            scratch: PlaneScratch::new(d),
            iteration: 0,
            diagnostics: HullDiagnostics::default(),
        };

        // Face `i` omits simplex[i]; its neighbor across the ridge opposite
        // simplex[j] is face `j`.
        let mut vertices = Vec::with_capacity(d);
        for omit in 0..=d {
            vertices.clear();
            vertices.extend(
                simplex
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &v)| v as u32),
            );
            vertices.sort_unstable();
            builder.add_face(&vertices)?;
        }
        for f in 0..=d {
            for k in 0..d {
                let v = builder.vertices[f * d + k] as usize;
                let j = simplex.iter().position(|&s| s == v).expect("simplex vertex");
                builder.neighbors[f * d + k] = j as u32;
            }
        }

        let mut in_simplex = vec![false; cloud.len()];
        for &s in &simplex {
            in_simplex[s] = true;
        }
        builder.diagnostics.points_processed = d + 1;
        for (i, p) in cloud.points().enumerate() {
            if !in_simplex[i] {
                builder.assign(i as u32, p, 0..=d);
            }
        }
        Ok(builder)
    }

    #[inline]
    fn distance(&self, f: usize, p: &[f64]) -> f64 {
        dot(&self.normals[f * self.d..(f + 1) * self.d], p) - self.offsets[f]
    }

    /// Puts `point` in the outside set of the first face it is above.
    fn assign(&mut self, point: u32, p: &[f64], faces: impl IntoIterator<Item = usize>) {
        for f in faces {
            let dist = self.distance(f, p);
            if dist > self.eps {
                if self.outside[f].is_empty() || dist > self.furthest[f].1 {
                    self.furthest[f] = (point, dist);
                }
                self.outside[f].push(point);
                return;
            }
        }
    }

    /// Creates a face on sorted `vertices`, reusing a dead slot when one is
    /// available. Neighbors are left unset.
    fn add_face(&mut self, vertices: &[u32]) -> Result<usize, HullError> {
        let d = self.d;
        let mut normal = [0.0; MAX_STACK_DIM];
        let mut pts: [&[f64]; MAX_STACK_DIM] = [&[]; MAX_STACK_DIM];
        let (normal, pts) = if d <= MAX_STACK_DIM {
            (&mut normal[..d], &mut pts[..d])
        } else {
            return self.add_face_heap(vertices);
        };
        let cloud = self.cloud;
        for (slot, &v) in pts.iter_mut().zip(vertices) {
            *slot = cloud.point(v as usize);
        }
        let offset = oriented_plane_into(pts, &self.interior, self.eps, &mut self.scratch, normal)
            .map_err(|e| plane_failure(e, vertices))?;
        Ok(self.store_face(vertices, normal, offset))
    }

    /// [`Self::add_face`] for the cone face over horizon ridge `(g, k)` with
    /// `across` the facet beyond it. The plane is taken from the two facet
    /// normals when that is accurate to a small fraction of `eps`.
    fn add_cone_face(&mut self, vertices: &[u32], g: usize, across: usize, apex: &[f64]) -> Result<usize, HullError> {
        let d = self.d;
        if d > MAX_STACK_DIM {
            return self.add_face_heap(vertices);
        }
        let mut normal = [0.0; MAX_STACK_DIM];
        let mut pts: [&[f64]; MAX_STACK_DIM] = [&[]; MAX_STACK_DIM];
        let cloud = self.cloud;
        for (slot, &v) in pts.iter_mut().zip(vertices) {
            *slot = cloud.point(v as usize);
        }
        let offset = cone_plane_into(
            &self.normals[g * d..(g + 1) * d],
            self.distance(g, apex),
            &self.normals[across * d..(across + 1) * d],
            -self.distance(across, apex),
            &pts[..d],
            self.eps * 1e-3,
            &mut normal[..d],
        );
        match offset {
            Some(offset) => Ok(self.store_face(vertices, &normal[..d], offset)),
            None => self.add_face(vertices),
        }
    }

    fn add_face_heap(&mut self, vertices: &[u32]) -> Result<usize, HullError> {
        let pts: Vec<&[f64]> = vertices.iter().map(|&v| self.cloud.point(v as usize)).collect();
        let mut normal = vec![0.0; self.d];
        let offset = oriented_plane_into(&pts, &self.interior, self.eps, &mut self.scratch, &mut normal)
            .map_err(|e| plane_failure(e, vertices))?;
        Ok(self.store_face(vertices, &normal, offset))
    }

    fn store_face(&mut self, vertices: &[u32], normal: &[f64], offset: f64) -> usize {
        let d = self.d;
        self.diagnostics.facets_created += 1;
        if let Some(f) = self.free.pop() {
            self.vertices[f * d..(f + 1) * d].copy_from_slice(vertices);
            self.neighbors[f * d..(f + 1) * d].fill(NO_FACE);
            self.normals[f * d..(f + 1) * d].copy_from_slice(normal);
            self.offsets[f] = offset;
            self.outside[f].clear();
            self.alive[f] = true;
            return f;
        }
        self.vertices.extend_from_slice(vertices);
        self.neighbors.extend(std::iter::repeat_n(NO_FACE, d));
        self.cone_of.extend(std::iter::repeat_n(NO_FACE, d));
        self.normals.extend_from_slice(normal);
        self.offsets.push(offset);
        self.outside.push(Vec::new());
        self.furthest.push((0, 0.0));
        self.alive.push(true);
        self.stamp.push(0);
        self.visible.push(false);
        self.offsets.len() - 1
    }

    fn expand(&mut self) -> Result<(), HullError> {
        let d = self.d;
        let cloud = self.cloud;
        // Faces by the distance of their furthest outside point, largest first.
        // Distances are positive, so their bit patterns order like the values.
        let key = |b: &Self, f: usize| (b.furthest[f].1.to_bits(), Reverse(f));
        let mut work: BinaryHeap<(u64, Reverse<usize>)> = (0..self.offsets.len())
            .filter(|&f| !self.outside[f].is_empty())
            .map(|f| key(self, f))
            .collect();
        let mut visible_set: Vec<usize> = Vec::new();
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut new_faces: Vec<usize> = Vec::new();
        let mut vertices: Vec<u32> = Vec::with_capacity(d);
        let mut orphans: Vec<u32> = Vec::new();

        while let Some(entry) = work.pop() {
            let Reverse(start) = entry.1;
            // Entries of deleted faces whose slot was reused are stale.
            if !self.alive[start] || self.outside[start].is_empty() || key(self, start) != entry {
                continue;
            }
            let apex = self.furthest[start].0;
            let apex_point = cloud.point(apex as usize);
            self.iteration += 1;
            let iter = self.iteration;

            // Visible region by flooding across ridges; its boundary is the horizon.
            visible_set.clear();
            horizon.clear();
            visible_set.push(start);
            self.stamp[start] = iter;
            self.visible[start] = true;
            let mut cursor = 0;
            while cursor < visible_set.len() {
                let g = visible_set[cursor];
                cursor += 1;
                for k in 0..d {
                    let h = self.neighbors[g * d + k] as usize;
                    if self.stamp[h] == iter {
                        if !self.visible[h] {
                            horizon.push((g, k));
                        }
                        continue;
                    }
                    self.stamp[h] = iter;
                    let dist = self.distance(h, apex_point);
                    if dist > self.eps {
                        self.visible[h] = true;
                        visible_set.push(h);
                    } else if dist >= -self.eps {
                        return Err(HullError::DegenerateInput(format!(
                            "point {apex} is incident to facet {:?}",
                            &self.vertices[h * d..(h + 1) * d]
                        )));
                    } else {
                        self.visible[h] = false;
                        horizon.push((g, k));
                    }
                }
            }

            // Cone from the apex over each horizon ridge.
            new_faces.clear();
            for &(g, k) in &horizon {
                let across = self.neighbors[g * d + k] as usize;
                vertices.clear();
                vertices.extend(
                    self.vertices[g * d..(g + 1) * d]
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &v)| v),
                );
                let apex_slot = vertices.binary_search(&apex).unwrap_err();
                vertices.insert(apex_slot, apex);
                let nf = self.add_cone_face(&vertices, g, across, apex_point)?;
                new_faces.push(nf);
                self.cone_of[g * d + k] = nf as u32;

                self.neighbors[nf * d + apex_slot] = across as u32;
                let back = self.neighbors[across * d..(across + 1) * d]
                    .iter()
                    .position(|&x| x as usize == g)
                    .expect("adjacency is symmetric");
                self.neighbors[across * d + back] = nf as u32;
            }

            // The ridge of a cone face opposite u holds S = R \ {u}, with R its
            // horizon ridge. Rotating around S through visible faces ends at
            // the other horizon ridge containing S, whose cone face is the
            // neighbor. Every face on the way is S plus two vertices, so the
            // one to rotate about next falls out of the XOR of its labels.
            // Each link is found once and set on both faces.
            for (&(g, k), &nf) in horizon.iter().zip(&new_faces) {
                let g_xor = xor_all(&self.vertices[g * d..(g + 1) * d]);
                let gk = self.vertices[g * d + k];
                let nf_xor = g_xor ^ gk ^ apex;
                for s in 0..d {
                    let u = self.vertices[nf * d + s];
                    if u == apex || self.neighbors[nf * d + s] != NO_FACE {
                        continue;
                    }
                    let sub_xor = g_xor ^ gk ^ u;
                    let (mut c, mut x) = (g, u);
                    let mut steps = 0;
                    let neighbor = loop {
                        let c_verts = &self.vertices[c * d..(c + 1) * d];
                        let px = c_verts.iter().position(|&v| v == x).expect("vertex of face");
                        let h = self.neighbors[c * d + px] as usize;
                        if !self.visible[h] {
                            break self.cone_of[c * d + px];
                        }
                        let y = xor_all(c_verts) ^ x ^ sub_xor;
                        (c, x) = (h, y);
                        steps += 1;
                        if steps > visible_set.len() {
                            return Err(HullError::DegenerateInput(
                                "horizon is not a closed ridge cycle".into(),
                            ));
                        }
                    };
                    self.neighbors[nf * d + s] = neighbor;
                    let nb = neighbor as usize;
                    let nb_verts = &self.vertices[nb * d..(nb + 1) * d];
                    let w = xor_all(nb_verts) ^ nf_xor ^ u;
                    let pw = nb_verts.iter().position(|&v| v == w).expect("vertex of face");
                    self.neighbors[nb * d + pw] = nf as u32;
                }
            }

            orphans.clear();
            for &g in &visible_set {
                self.alive[g] = false;
                orphans.append(&mut self.outside[g]);
            }
            self.free.extend_from_slice(&visible_set);
            self.diagnostics.facets_deleted += visible_set.len();
            self.diagnostics.points_processed += 1;

            for &q in &orphans {
                if q != apex {
                    self.assign(q, cloud.point(q as usize), new_faces.iter().copied());
                }
            }
            for &f in &new_faces {
                if !self.outside[f].is_empty() {
                    work.push(key(self, f));
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> HullResult {
        let d = self.d;
        let mut remap = vec![usize::MAX; self.alive.len()];
        let mut next = 0;
        for (i, &alive) in self.alive.iter().enumerate() {
            if alive {
                remap[i] = next;
                next += 1;
            }
        }
        let mut facets = Vec::with_capacity(next);
        let mut neighbors = Vec::with_capacity(next);
        let mut is_vertex = vec![false; self.cloud.len()];
        for f in (0..self.alive.len()).filter(|&f| self.alive[f]) {
            let vertices: Vec<usize> = self.vertices[f * d..(f + 1) * d]
                .iter()
                .map(|&v| v as usize)
                .collect();
            for &v in &vertices {
                is_vertex[v] = true;
            }
            neighbors.push(
                self.neighbors[f * d..(f + 1) * d]
                    .iter()
                    .map(|&g| remap[g as usize])
                    .collect(),
            );
            facets.push(Facet {
                vertices,
                normal: self.normals[f * d..(f + 1) * d].to_vec(),
                offset: self.offsets[f],
            });
        }
        let vertex_indices = is_vertex
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v)
            .map(|(i, _)| i)
            .collect();
        HullResult {
            d,
            facets,
            neighbors,
            vertex_indices,
            diagnostics: self.diagnostics,
        }
    }
}

fn xor_all(labels: &[u32]) -> u32 {
    labels.iter().fold(0, |acc, &v| acc ^ v)
}

fn plane_failure(e: PlaneError, vertices: &[u32]) -> HullError {
    HullError::DegenerateInput(match e {
        PlaneError::RankDeficient => format!("facet {vertices:?} is rank deficient"),
        PlaneError::ReferenceIncident => format!("facet {vertices:?} passes through the interior"),
    })
}
