//! Bowyer–Watson Delaunay triangulation of control points.
//!
//! The unbounded region is represented by "ghost" triangles sharing a single
//! vertex at infinity, so the output always covers the convex hull of the
//! input. Orientation and in-circle signs come from exact adaptive
//! predicates. Exact duplicates are triangulated once; cocircular ties are
//! resolved afterwards by flipping to the diagonal with the lowest vertex
//! index.

use std::collections::{BTreeMap, HashMap, HashSet};

use robust::{incircle, orient2d};

use super::point::Point2;
use crate::error::{Error, Result};

const GHOST: usize = usize::MAX;

/// Triangles below this area are dropped from the mesh.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshEdge {
    /// Smaller vertex index.
    pub a: usize,
    pub b: usize,
    /// Rest length of the edge.
    pub weight: f64,
}

/// Triangulation topology over a frame's control points.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertex_count: usize,
    /// Counter-clockwise in the rest frame.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<MeshEdge>,
    /// For triangle `[a, b, c]`, indices into `edges` of `ab`, `bc`, `ca`.
    pub triangle_edges: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Builds a mesh from triangles, weighting each edge by its length in `rest`.
    pub fn from_triangles(rest: &[Point2], triangles: Vec<[usize; 3]>) -> Result<Self> {
        let n = rest.len();
        if triangles.iter().flatten().any(|&i| i >= n) {
            return Err(Error::shape("triangle index out of range"));
        }
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = ordered(t[k], t[(k + 1) % 3]);
                index.entry((a, b)).or_insert(0);
            }
        }
        let mut edges = Vec::with_capacity(index.len());
        for (slot, ((a, b), id)) in index.iter_mut().enumerate() {
            *id = slot;
            edges.push(MeshEdge {
                a: *a,
                b: *b,
                weight: rest[*a].distance(rest[*b]),
            });
        }
        let triangle_edges = triangles
            .iter()
            .map(|t| std::array::from_fn(|k| index[&ordered(t[k], t[(k + 1) % 3])]))
            .collect();
        Ok(TriangleMesh {
            vertex_count: n,
            triangles,
            edges,
            triangle_edges,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[inline]
fn orient(p: &[Point2], a: usize, b: usize, c: usize) -> f64 {
    orient2d(p[a].into(), p[b].into(), p[c].into())
}

/// Signed doubled area in plain floating point.
#[inline]
pub fn signed_area2(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Delaunay triangulation of `points`; edge weights are rest-frame lengths.
pub fn delaunay_triangulate(points: &[Point2]) -> Result<TriangleMesh> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::shape(format!("point {i} is not finite")));
    }
    let reps = distinct(points);
    if reps.len() < 3 {
        return Err(Error::TooFewPoints(reps.len()));
    }
    let (a, mut b) = (reps[0], reps[1]);
    let mut c = reps[2..]
        .iter()
        .copied()
        .find(|&k| orient(points, a, b, k) != 0.0)
        .ok_or(Error::AllCollinear)?;
    if orient(points, a, b, c) < 0.0 {
        std::mem::swap(&mut b, &mut c);
    }

    let mut tris: Vec<Option<[usize; 3]>> = vec![
        Some([a, b, c]),
        Some([b, a, GHOST]),
        Some([c, b, GHOST]),
        Some([a, c, GHOST]),
    ];

    for &p in reps.iter().filter(|&&k| k != a && k != b && k != c) {
        let cavity: Vec<usize> = tris
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.filter(|t| in_conflict(points, t, p)).map(|_| i))
            .collect();
        debug_assert!(!cavity.is_empty());
        let mut directed = HashSet::with_capacity(cavity.len() * 3);
        for &i in &cavity {
            let t = tris[i].expect("live triangle");
            for k in 0..3 {
                directed.insert((t[k], t[(k + 1) % 3]));
            }
        }
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for &i in &cavity {
            let t = tris[i].take().expect("live triangle");
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if !directed.contains(&(e.1, e.0)) {
                    boundary.push(e);
                }
            }
        }
        for (u, v) in boundary {
            let t = if u == GHOST {
                [v, p, GHOST]
            } else if v == GHOST {
                [p, u, GHOST]
            } else {
                [u, v, p]
            };
            tris.push(Some(t));
        }
        tris.retain(Option::is_some);
    }

    let mut real: Vec<[usize; 3]> = tris
        .into_iter()
        .flatten()
        .filter(|t| !t.contains(&GHOST))
        .collect();
    flip_cocircular_ties(points, &mut real);

    let before = real.len();
    real.retain(|t| {
        0.5 * signed_area2(points[t[0]], points[t[1]], points[t[2]]) >= DEGENERATE_AREA
    });
    if real.len() < before {
        log::warn!(
            "dropped {} near-degenerate triangle(s) from the control-point mesh",
            before - real.len()
        );
    }
    real.sort_unstable();
    TriangleMesh::from_triangles(points, real)
}

/// Indices of the first occurrence of every distinct point, in order.
fn distinct(points: &[Point2]) -> Vec<usize> {
    let mut seen = HashMap::with_capacity(points.len());
    let mut reps = Vec::new();
    for (i, p) in points.iter().enumerate() {
        // +0.0 and -0.0 are the same location.
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        if seen.insert(key, i).is_none() {
            reps.push(i);
        } else {
            log::debug!("point {i} duplicates an earlier point and is not meshed");
        }
    }
    reps
}

fn in_conflict(points: &[Point2], t: &[usize; 3], p: usize) -> bool {
    if t[2] == GHOST {
        let (u, v) = (t[0], t[1]);
        let o = orient(points, u, v, p);
        if o != 0.0 {
            return o > 0.0;
        }
        // On the hull line: conflicts only if strictly inside the segment.
        let (pu, pv, pp) = (points[u], points[v], points[p]);
        let d = (pp - pu).dot(pv - pu);
        return d > 0.0 && d < (pv - pu).norm_squared();
    }
    incircle(
        points[t[0]].into(),
        points[t[1]].into(),
        points[t[2]].into(),
        points[p].into(),
    ) > 0.0
}

/// Where two triangles share an edge whose four vertices are exactly
/// cocircular, prefers the diagonal whose smaller endpoint index is lowest.
/// Each flip strictly lowers the sum of per-edge minimum indices, so this
/// terminates.
fn flip_cocircular_ties(points: &[Point2], tris: &mut [[usize; 3]]) {
    loop {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(tris.len() * 3);
        for (i, t) in tris.iter().enumerate() {
            for k in 0..3 {
                owner.insert((t[k], t[(k + 1) % 3]), i);
            }
        }
        let mut flipped = false;
        'search: for i in 0..tris.len() {
            let t = tris[i];
            for k in 0..3 {
                let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
                let Some(&j) = owner.get(&(b, a)) else {
                    continue;
                };
                let other = tris[j];
                let d = other
                    .iter()
                    .copied()
                    .find(|&v| v != a && v != b)
                    .expect("neighbour has a third vertex");
                let circ = incircle(
                    points[a].into(),
                    points[b].into(),
                    points[c].into(),
                    points[d].into(),
                );
                if circ == 0.0 && c.min(d) < a.min(b) {
                    tris[i] = [c, a, d];
                    tris[j] = [d, b, c];
                    flipped = true;
                    break 'search;
                }
            }
        }
        if !flipped {
            return;
        }
    }
}
