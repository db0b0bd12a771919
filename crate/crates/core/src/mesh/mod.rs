//! Closed triangulated surfaces carrying an intrinsic metric.
//!
//! A [`SurfaceMesh`] stores only combinatorics and edge lengths; every
//! geometric quantity (areas, corner angles, local layouts) is derived from
//! lengths by the law of cosines, so surfaces that admit no embedding in
//! three-space are represented as easily as flat ones.

mod conformal;
mod fixed;
mod generators;
mod involution;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::union_find::DisjointSets;
use crate::Real;

pub use conformal::{prescribe_angle_sums, prescribe_angle_sums_with, ConformalOptions};
pub use fixed::{fixed_point_set, is_separating, CurveLoop, FixedCurve};
pub use generators::{flat_torus_glide, gen_flat_torus, gen_genus2, gen_genus2_with, Genus2Metric};
pub use involution::{validate_involution, Involution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("mesh has no vertices or no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {vertex} outside 0..{vertex_count}")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("edge ({0}, {1}) is not shared by exactly two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("the triangles around vertex {0} do not form a single disk")]
    NonManifoldVertex(usize),
    #[error("triangle {0} duplicates another triangle")]
    DuplicateTriangle(usize),
    #[error("mesh is not connected")]
    Disconnected,
    #[error("triangle {0} is degenerate (repeated vertex or triangle inequality violated)")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) is traversed in the same direction by both of its triangles")]
    InconsistentOrientation(usize, usize),
    #[error("no length given for edge ({0}, {1})")]
    MissingLength(usize, usize),
    #[error("edge ({0}, {1}) has a non-positive or non-finite length")]
    NonPositiveLength(usize, usize),
    #[error("grid resolution {0} must be even and at least 4")]
    BadResolution(usize),
    #[error("vertex map is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("map is not an involution at vertex {0}")]
    NotInvolutive(usize),
    #[error("map changes the length of edge ({0}, {1})")]
    NotIsometric(usize, usize),
    #[error("image of triangle {0} is not a triangle")]
    NotSimplicial(usize),
    #[error("involution preserves the orientation of triangle {0}")]
    OrientationPreserving(usize),
    #[error("fixed vertices do not form disjoint simple loops (vertex {0})")]
    FixedSetNotCurve(usize),
    #[error("metric construction failed: {0}")]
    Metric(String),
}

/// Undirected edge key with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    pub lo: usize,
    pub hi: usize,
}

impl EdgeKey {
    #[inline]
    pub fn new(a: usize, b: usize) -> Self {
        if a < b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }
}

/// Edge lengths keyed by undirected edge.
pub type EdgeLengths<T> = HashMap<EdgeKey, T>;

/// Closed, connected, consistently oriented triangulated surface with an
/// intrinsic metric.
#[derive(Debug, Clone)]
pub struct SurfaceMesh<T> {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    edges: Vec<EdgeKey>,
    edge_lookup: HashMap<EdgeKey, usize>,
    lengths: Vec<T>,
    /// `[left, right]`: the triangle traversing `lo -> hi`, then `hi -> lo`.
    edge_triangles: Vec<[usize; 2]>,
    /// Edge index of `(t[k], t[k+1])` for `k = 0, 1, 2`.
    triangle_edges: Vec<[usize; 3]>,
    /// Triangles around each vertex in counter-clockwise rotation order.
    fans: Vec<Vec<usize>>,
    triangle_lookup: HashMap<[usize; 3], usize>,
    areas: Vec<T>,
    total_area: T,
}

impl<T: Real> SurfaceMesh<T> {
    /// Validates the combinatorics and metric and caches adjacency.
    pub fn new(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        lengths: &EdgeLengths<T>,
    ) -> Result<Self, MeshError> {
        if vertex_count == 0 || triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let mut triangle_lookup = HashMap::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertex_count {
                    return Err(MeshError::VertexOutOfRange {
                        triangle: t,
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle(t));
            }
            if triangle_lookup.insert(sorted3(*tri), t).is_some() {
                return Err(MeshError::DuplicateTriangle(t));
            }
        }

        // Directed half-edges -> triangle.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
        let mut incidence: HashMap<EdgeKey, usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *incidence.entry(EdgeKey::new(a, b)).or_default() += 1;
                if directed.insert((a, b), t).is_some() {
                    return Err(MeshError::InconsistentOrientation(a.min(b), a.max(b)));
                }
            }
        }
        let mut edges: Vec<EdgeKey> = incidence.keys().copied().collect();
        edges.sort_unstable();
        for e in &edges {
            if incidence[e] != 2 {
                return Err(MeshError::NonManifoldEdge(e.lo, e.hi));
            }
            if !directed.contains_key(&(e.lo, e.hi)) || !directed.contains_key(&(e.hi, e.lo)) {
                return Err(MeshError::InconsistentOrientation(e.lo, e.hi));
            }
        }
        let edge_lookup: HashMap<EdgeKey, usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let edge_triangles: Vec<[usize; 2]> = edges
            .iter()
            .map(|e| [directed[&(e.lo, e.hi)], directed[&(e.hi, e.lo)]])
            .collect();
        let triangle_edges: Vec<[usize; 3]> = triangles
            .iter()
            .map(|tri| {
                let f = |k: usize| edge_lookup[&EdgeKey::new(tri[k], tri[(k + 1) % 3])];
                [f(0), f(1), f(2)]
            })
            .collect();

        // Rotation order around each vertex: from (v, a, b), the next
        // triangle counter-clockwise traverses v -> b.
        let mut incident = vec![0usize; vertex_count];
        let mut any_triangle = vec![usize::MAX; vertex_count];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                incident[v] += 1;
                if any_triangle[v] == usize::MAX {
                    any_triangle[v] = t;
                }
            }
        }
        let mut fans = Vec::with_capacity(vertex_count);
        for v in 0..vertex_count {
            if incident[v] == 0 {
                return Err(MeshError::Disconnected);
            }
            let start = any_triangle[v];
            let mut fan = vec![start];
            let mut t = start;
            loop {
                let tri = triangles[t];
                let k = tri.iter().position(|&x| x == v).unwrap();
                let prev = tri[(k + 2) % 3];
                t = directed[&(v, prev)];
                if t == start {
                    break;
                }
                if fan.len() > incident[v] {
                    return Err(MeshError::NonManifoldVertex(v));
                }
                fan.push(t);
            }
            if fan.len() != incident[v] {
                return Err(MeshError::NonManifoldVertex(v));
            }
            fans.push(fan);
        }

        let mut edge_lengths = Vec::with_capacity(edges.len());
        for e in &edges {
            let l = *lengths
                .get(e)
                .ok_or(MeshError::MissingLength(e.lo, e.hi))?;
            if !(l > T::zero()) || !l.is_finite() {
                return Err(MeshError::NonPositiveLength(e.lo, e.hi));
            }
            edge_lengths.push(l);
        }

        let mut areas = Vec::with_capacity(triangles.len());
        for (t, te) in triangle_edges.iter().enumerate() {
            let [a, b, c] = te.map(|e| edge_lengths[e]);
            if !(a < b + c && b < a + c && c < a + b) {
                return Err(MeshError::DegenerateTriangle(t));
            }
            let area = heron(a, b, c);
            if !(area > T::zero()) {
                return Err(MeshError::DegenerateTriangle(t));
            }
            areas.push(area);
        }
        let total_area = areas.iter().copied().sum();

        let mut ds = DisjointSets::new(triangles.len());
        for et in &edge_triangles {
            ds.union(et[0], et[1]);
        }
        if ds.labels().1 != 1 {
            return Err(MeshError::Disconnected);
        }

        Ok(Self {
            vertex_count,
            triangles,
            edges,
            edge_lookup,
            lengths: edge_lengths,
            edge_triangles,
            triangle_edges,
            fans,
            triangle_lookup,
            areas,
            total_area,
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    #[inline]
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    #[inline]
    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: usize) -> EdgeKey {
        self.edges[e]
    }

    #[inline]
    pub fn edge_length(&self, e: usize) -> T {
        self.lengths[e]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&EdgeKey::new(a, b)).copied()
    }

    pub fn length_between(&self, a: usize, b: usize) -> Option<T> {
        self.edge_index(a, b).map(|e| self.lengths[e])
    }

    /// The two triangles on edge `e`: the one traversing it `lo -> hi`
    /// first.
    #[inline]
    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.edge_triangles[e]
    }

    /// Edge indices of `(t0,t1)`, `(t1,t2)`, `(t2,t0)`.
    #[inline]
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// Triangles around `v` in counter-clockwise order.
    #[inline]
    pub fn fan(&self, v: usize) -> &[usize] {
        &self.fans[v]
    }

    /// Looks a triangle up by its vertex set, in any order.
    pub fn find_triangle(&self, tri: [usize; 3]) -> Option<usize> {
        self.triangle_lookup.get(&sorted3(tri)).copied()
    }

    #[inline]
    pub fn area(&self, t: usize) -> T {
        self.areas[t]
    }

    #[inline]
    pub fn total_area(&self) -> T {
        self.total_area
    }

    /// Lengths opposite to `t[0]`, `t[1]`, `t[2]`.
    pub fn opposite_lengths(&self, t: usize) -> [T; 3] {
        let [e01, e12, e20] = self.triangle_edges[t].map(|e| self.lengths[e]);
        [e12, e20, e01]
    }

    /// Interior angles at `t[0]`, `t[1]`, `t[2]`.
    pub fn corner_angles(&self, t: usize) -> [T; 3] {
        let [a, b, c] = self.opposite_lengths(t);
        [corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)]
    }

    /// Cotangents of the angles at `t[0]`, `t[1]`, `t[2]`.
    pub fn corner_cotangents(&self, t: usize) -> [T; 3] {
        let [a, b, c] = self.opposite_lengths(t);
        let four_area = T::lit(4.0) * self.areas[t];
        [
            (b * b + c * c - a * a) / four_area,
            (c * c + a * a - b * b) / four_area,
            (a * a + b * b - c * c) / four_area,
        ]
    }

    /// Total angle at `v`.
    pub fn angle_sum(&self, v: usize) -> T {
        self.fans[v]
            .iter()
            .map(|&t| {
                let k = self.triangles[t].iter().position(|&x| x == v).unwrap();
                self.corner_angles(t)[k]
            })
            .sum()
    }

    /// Planar layout of triangle `t`: `t[0]` at the origin, `t[1]` on the
    /// positive x axis, `t[2]` in the upper half plane.
    pub fn layout(&self, t: usize) -> [[T; 2]; 3] {
        let [a, b, c] = self.opposite_lengths(t);
        // c = |t0 t1|, b = |t0 t2|.
        let x2 = (b * b + c * c - a * a) / (T::lit(2.0) * c);
        let y2 = T::lit(2.0) * self.areas[t] / c;
        [[T::zero(), T::zero()], [c, T::zero()], [x2, y2]]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// `(2 - chi) / 2`. Orientability and connectedness are guaranteed by
    /// construction, so the result is a nonnegative integer.
    pub fn genus(&self) -> usize {
        let chi = self.euler_characteristic();
        debug_assert!(chi <= 2 && chi % 2 == 0);
        ((2 - chi) / 2) as usize
    }

    /// Edge lengths as a map, e.g. for serialization.
    pub fn length_map(&self) -> EdgeLengths<T> {
        self.edges.iter().copied().zip(self.lengths.iter().copied()).collect()
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self, MeshError> {
        let tris = self.triangles.iter().map(|t| t.map(|v| perm[v])).collect();
        let lengths = self
            .edges
            .iter()
            .zip(&self.lengths)
            .map(|(e, &l)| (EdgeKey::new(perm[e.lo], perm[e.hi]), l))
            .collect();
        Self::new(self.vertex_count, tris, &lengths)
    }
}

/// Convenience constructor matching the free-function form.
pub fn build_mesh<T: Real>(
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    lengths: &EdgeLengths<T>,
) -> Result<SurfaceMesh<T>, MeshError> {
    SurfaceMesh::new(vertex_count, triangles, lengths)
}

pub fn genus<T: Real>(mesh: &SurfaceMesh<T>) -> usize {
    mesh.genus()
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Numerically stable Heron formula.
pub(crate) fn heron<T: Real>(a: T, b: T, c: T) -> T {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= T::zero() {
        return T::zero();
    }
    T::lit(0.25) * p.sqrt()
}

/// Angle opposite to side `a` in a triangle with sides `a, b, c`.
pub(crate) fn corner_angle<T: Real>(a: T, b: T, c: T) -> T {
    let cos = (b * b + c * c - a * a) / (T::lit(2.0) * b * c);
    cos.max(-T::one()).min(T::one()).acos()
}
