//! Restriction of eigenfunctions to closed edge paths: Dirichlet and
//! normalized Neumann traces, periods, and sign changes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::SurfaceMesh;
use crate::spectral::EigenPair;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RestrictionError {
    #[error("vertices {0} and {1} are not joined by a mesh edge")]
    NotAPath(usize, usize),
    #[error("path does not close up into a loop")]
    NotClosed,
    #[error("path visits vertex {0} twice")]
    SelfIntersecting(usize),
    #[error("vertex {0} is not a mesh vertex")]
    VertexOutOfRange(usize),
    #[error("normal derivative trace of a zero eigenvalue cannot be normalized")]
    ZeroEigenvalue,
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("segment resolves to no path edge")]
    EmptySegment,
    #[error("every sample is below the zero tolerance")]
    AllAmbiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Left of the direction of travel (counter-clockwise side).
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Closed simple loop along mesh edges, parameterized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePath<T> {
    vertices: Vec<usize>,
    /// Arc length at each vertex; `s[0] = 0`.
    s: Vec<T>,
    /// Length of edge `(v_i, v_{i+1})`, cyclically.
    edge_lengths: Vec<T>,
    length: T,
    /// Triangles at `v_i` strictly left of the path, counter-clockwise from
    /// the outgoing edge to the incoming one.
    left_fans: Vec<Vec<usize>>,
    right_fans: Vec<Vec<usize>>,
    pub normal_side: Side,
}

impl<T: Real> CurvePath<T> {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn arc_positions(&self) -> &[T] {
        &self.s
    }

    pub fn edge_lengths(&self) -> &[T] {
        &self.edge_lengths
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn fan(&self, i: usize, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left_fans[i],
            Side::Right => &self.right_fans[i],
        }
    }

    /// The same loop with the normal on the other side.
    pub fn with_normal_side(&self, side: Side) -> Self {
        Self {
            normal_side: side,
            ..self.clone()
        }
    }

    /// Triangles on either side of the loop, for classification of
    /// neighbourhoods.
    pub fn side_triangles(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        let fans = match side {
            Side::Left => &self.left_fans,
            Side::Right => &self.right_fans,
        };
        fans.iter().flatten().copied()
    }
}

/// Builds a path from a cyclic vertex list; a repeated first vertex at the
/// end is accepted and dropped.
pub fn make_path<T: Real>(
    mesh: &SurfaceMesh<T>,
    vertices: &[usize],
) -> Result<CurvePath<T>, RestrictionError> {
    let mut verts = vertices.to_vec();
    if verts.len() > 1 && verts.first() == verts.last() {
        verts.pop();
    }
    if verts.len() < 3 {
        return Err(RestrictionError::NotClosed);
    }
    let n = verts.len();
    let mut seen = std::collections::HashSet::new();
    for &v in &verts {
        if v >= mesh.vertex_count() {
            return Err(RestrictionError::VertexOutOfRange(v));
        }
        if !seen.insert(v) {
            return Err(RestrictionError::SelfIntersecting(v));
        }
    }
    let mut edge_lengths = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (verts[i], verts[(i + 1) % n]);
        match mesh.length_between(a, b) {
            Some(l) => edge_lengths.push(l),
            None if i == n - 1 => return Err(RestrictionError::NotClosed),
            None => return Err(RestrictionError::NotAPath(a, b)),
        }
    }
    let mut s = Vec::with_capacity(n);
    let mut acc = T::zero();
    for l in &edge_lengths {
        s.push(acc);
        acc += *l;
    }
    let mut left_fans = Vec::with_capacity(n);
    let mut right_fans = Vec::with_capacity(n);
    for i in 0..n {
        let v = verts[i];
        let p = verts[(i + n - 1) % n];
        let q = verts[(i + 1) % n];
        left_fans.push(sweep(mesh, v, q, p));
        right_fans.push(sweep(mesh, v, p, q));
    }
    let smallest = |fans: &Vec<Vec<usize>>| {
        fans.iter()
            .flatten()
            .map(|&t| {
                let mut k = mesh.triangle(t);
                k.sort_unstable();
                k
            })
            .min()
            .unwrap()
    };
    let normal_side = if smallest(&left_fans) <= smallest(&right_fans) {
        Side::Left
    } else {
        Side::Right
    };
    Ok(CurvePath {
        vertices: verts,
        s,
        edge_lengths,
        length: acc,
        left_fans,
        right_fans,
        normal_side,
    })
}

/// Triangles around `v` counter-clockwise from the one on `v -> from` to
/// the one on `to -> v`.
fn sweep<T: Real>(mesh: &SurfaceMesh<T>, v: usize, from: usize, to: usize) -> Vec<usize> {
    let on_directed = |a: usize, b: usize| {
        let e = mesh.edge_index(a, b).expect("path edge");
        mesh.edge_triangles(e)[if a < b { 0 } else { 1 }]
    };
    let stop = on_directed(to, v);
    let mut t = on_directed(v, from);
    let mut fan = vec![t];
    while t != stop {
        let tri = mesh.triangle(t);
        let k = tri.iter().position(|&x| x == v).unwrap();
        t = on_directed(v, tri[(k + 2) % 3]);
        fan.push(t);
    }
    fan
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Dirichlet,
    NeumannNormalized,
}

/// Samples of an eigenfunction (or its normalized normal derivative) at the
/// vertices of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace<T> {
    pub kind: TraceKind,
    pub samples: Vec<T>,
    pub s: Vec<T>,
    pub edge_lengths: Vec<T>,
    pub eigen_index: usize,
    pub eigenvalue: T,
}

impl<T: Real> CurveTrace<T> {
    pub fn length(&self) -> T {
        self.edge_lengths.iter().copied().sum()
    }

    /// Trace with arbitrary samples on the same path, e.g. an observable.
    pub fn with_samples(&self, samples: Vec<T>) -> Self {
        Self {
            samples,
            ..self.clone()
        }
    }
}

pub fn restrict<T: Real>(
    pair: &EigenPair<T>,
    mesh: &SurfaceMesh<T>,
    path: &CurvePath<T>,
    kind: TraceKind,
) -> Result<CurveTrace<T>, RestrictionError> {
    if pair.coefficients.len() != mesh.vertex_count() {
        return Err(RestrictionError::LengthMismatch {
            expected: mesh.vertex_count(),
            got: pair.coefficients.len(),
        });
    }
    let samples = match kind {
        TraceKind::Dirichlet => path.vertices.iter().map(|&v| pair.coefficients[v]).collect(),
        TraceKind::NeumannNormalized => {
            if !(pair.eigenvalue > T::zero()) {
                return Err(RestrictionError::ZeroEigenvalue);
            }
            let h = T::one() / pair.eigenvalue.sqrt();
            normal_derivative(&pair.coefficients, mesh, path)
                .into_iter()
                .map(|d| h * d)
                .collect()
        }
    };
    Ok(CurveTrace {
        kind,
        samples,
        s: path.s.clone(),
        edge_lengths: path.edge_lengths.clone(),
        eigen_index: pair.index,
        eigenvalue: pair.eigenvalue,
    })
}

/// Normal derivative of the piecewise-linear interpolant of `f` at each
/// path vertex, with the normal pointing into `path.normal_side`.
///
/// On each side the fan at the vertex is developed into a half plane (its
/// corner angles scaled to sum to pi, the path along the boundary line),
/// triangle gradients are averaged with corner-angle weights, and the two
/// one-sided values are averaged.
pub fn normal_derivative<T: Real>(f: &[T], mesh: &SurfaceMesh<T>, path: &CurvePath<T>) -> Vec<T> {
    let n = path.len();
    (0..n)
        .map(|i| {
            let v = path.vertices[i];
            let into_left = one_sided(f, mesh, v, &path.left_fans[i]);
            let into_right = one_sided(f, mesh, v, &path.right_fans[i]);
            let half = T::lit(0.5);
            match path.normal_side {
                Side::Left => half * (into_left - into_right),
                Side::Right => half * (into_right - into_left),
            }
        })
        .collect()
}

/// Derivative at `v` in the direction pointing into the fan, which spans a
/// half plane after angle scaling.
fn one_sided<T: Real>(f: &[T], mesh: &SurfaceMesh<T>, v: usize, fan: &[usize]) -> T {
    let mut corners = Vec::with_capacity(fan.len());
    let mut total = T::zero();
    for &t in fan {
        let tri = mesh.triangle(t);
        let k = tri.iter().position(|&x| x == v).unwrap();
        let angle = mesh.corner_angles(t)[k];
        let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        corners.push((a, b, angle));
        total += angle;
    }
    let scale = T::PI() / total;
    let mut theta = T::zero();
    let mut acc = T::zero();
    for &(a, b, angle) in &corners {
        let la = mesh.length_between(v, a).unwrap();
        let lb = mesh.length_between(v, b).unwrap();
        let t0 = theta;
        theta += angle * scale;
        let pa = [la * t0.cos(), la * t0.sin()];
        let pb = [lb * theta.cos(), lb * theta.sin()];
        let (da, db) = (f[a] - f[v], f[b] - f[v]);
        // Solve [pa; pb] g = [da; db] for the y component of g.
        let det = pa[0] * pb[1] - pa[1] * pb[0];
        let gy = (pa[0] * db - pb[0] * da) / det;
        acc += angle * gy;
    }
    acc / total
}

/// Trapezoidal `\int f trace ds` around the loop.
pub fn period_integral<T: Real>(trace: &CurveTrace<T>, f: &[T]) -> Result<T, RestrictionError> {
    let n = trace.samples.len();
    if f.len() != n {
        return Err(RestrictionError::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for i in 0..n {
        let j = (i + 1) % n;
        acc += half * trace.edge_lengths[i] * (f[i] * trace.samples[i] + f[j] * trace.samples[j]);
    }
    Ok(acc)
}

/// Trapezoidal `\int trace^2 ds` over the arc from `s_start` to `s_end`,
/// each end snapped to the nearest path vertex. The square is returned, not
/// its root.
pub fn l2_norm_on_segment<T: Real>(
    trace: &CurveTrace<T>,
    s_start: T,
    s_end: T,
) -> Result<T, RestrictionError> {
    let n = trace.samples.len();
    let length = trace.length();
    if !(s_start >= T::zero() && s_start < s_end && s_end <= length) {
        return Err(RestrictionError::EmptySegment);
    }
    let nearest = |s: T| -> usize {
        let mut best = (0usize, T::infinity());
        for i in 0..=n {
            let si = if i == n { length } else { trace.s[i] };
            let d = (si - s).abs();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    };
    let (a, b) = (nearest(s_start), nearest(s_end));
    if a >= b {
        return Err(RestrictionError::EmptySegment);
    }
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for i in a..b {
        let (x, y) = (trace.samples[i % n], trace.samples[(i + 1) % n]);
        acc += half * trace.edge_lengths[i % n] * (x * x + y * y);
    }
    Ok(acc)
}

/// Cyclic sign flips among samples above `zero_tol` in magnitude; the flag
/// is raised when more than a fifth of the samples were skipped.
pub fn count_sign_changes<T: Real>(
    trace: &CurveTrace<T>,
    zero_tol: T,
) -> Result<(usize, bool), RestrictionError> {
    let signs: Vec<bool> = trace
        .samples
        .iter()
        .filter(|x| x.abs() > zero_tol)
        .map(|&x| x > T::zero())
        .collect();
    if signs.is_empty() {
        return Err(RestrictionError::AllAmbiguous);
    }
    let skipped = trace.samples.len() - signs.len();
    let flips = (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count();
    Ok((flips, 5 * skipped > trace.samples.len()))
}

/// Arc-length positions where the cyclic sample sequence changes sign,
/// linearly interpolated inside the edge where it happens. Samples at or
/// below `zero_tol` are skipped as in [`count_sign_changes`].
pub fn sign_change_positions<T: Real>(trace: &CurveTrace<T>, zero_tol: T) -> Vec<T> {
    let n = trace.samples.len();
    let length = trace.length();
    let kept: Vec<usize> = (0..n).filter(|&i| trace.samples[i].abs() > zero_tol).collect();
    let mut out = Vec::new();
    for w in 0..kept.len() {
        let i = kept[w];
        let j = kept[(w + 1) % kept.len()];
        let (a, b) = (trace.samples[i], trace.samples[j]);
        if (a > T::zero()) == (b > T::zero()) {
            continue;
        }
        let si = trace.s[i];
        let mut sj = trace.s[j];
        if sj <= si {
            sj += length;
        }
        let mut s = si + (sj - si) * a / (a - b);
        if s >= length {
            s -= length;
        }
        out.push(s);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}
