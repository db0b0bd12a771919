//! Nodal sets, nodal domains and the nodal graph of eigenfunctions with
//! definite parity under an involution.
//!
//! All geometry is that of the piecewise-linear interpolant. Vertex values
//! that are numerically zero are perturbed symbolically to a small positive
//! value, except that an odd eigenfunction keeps its exact zeros on the
//! fixed set of the involution.

mod graph;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Involution, SurfaceMesh};
use crate::restriction::RestrictionError;
use crate::spectral::{sup_norm, EigenPair, Parity};
use crate::union_find::DisjointSets;
use crate::Real;

pub use graph::{
    build_nodal_graph, detect_singular_points, euler_check, lemma1_bounds, GraphVertexRole,
    NodalGraph,
};

/// Default `vertex_zero_tol` relative to the sup norm of the eigenfunction.
pub const DEFAULT_VERTEX_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodalError {
    #[error("operation requires an eigenpair of definite parity (got {0:?})")]
    WrongParity(Parity),
    #[error("triangle {0} has three vertices on the nodal set")]
    DegenerateZeroTriangle(usize),
    #[error("path vertex {0} is not fixed by the involution")]
    PathNotFixed(usize),
    #[error("nodal domains and graph come from pairs of different parity")]
    InconsistentInputs,
    #[error("coefficient vector has {got} entries, mesh has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Restriction(#[from] RestrictionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
    Zero,
}

impl Sign {
    fn slot(self) -> usize {
        match self {
            Sign::Positive => 0,
            Sign::Negative => 1,
            Sign::Zero => unreachable!("zero has no piece"),
        }
    }

    fn from_slot(slot: usize) -> Sign {
        if slot == 0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Vertex signs after symbolic perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct SignField<T> {
    pub signs: Vec<Sign>,
    /// Vertex values with perturbed zeros replaced by `±vertex_zero_tol`.
    pub values: Vec<T>,
    /// Vertices whose value was perturbed.
    pub nudged: Vec<usize>,
    pub parity: Parity,
}

/// Classifies vertex signs. Values with `|v| < rel_tol * sup` are nudged to
/// `+rel_tol * sup`; for an odd pair the nudge of a mirrored pair of
/// vertices is antisymmetric, and vertices fixed by `inv` are exact zeros.
pub fn vertex_signs<T: Real>(
    pair: &EigenPair<T>,
    inv: Option<&Involution>,
    rel_tol: T,
) -> SignField<T> {
    let tol = rel_tol * sup_norm(pair);
    let odd = pair.parity == Parity::Odd;
    let mut signs = Vec::with_capacity(pair.coefficients.len());
    let mut values = Vec::with_capacity(pair.coefficients.len());
    let mut nudged = Vec::new();
    for (v, &x) in pair.coefficients.iter().enumerate() {
        let fixed_zero = odd && inv.is_some_and(|s| s.is_fixed(v));
        if fixed_zero {
            signs.push(Sign::Zero);
            values.push(T::zero());
        } else if x.abs() < tol || x == T::zero() {
            nudged.push(v);
            let up = match (odd, inv) {
                (true, Some(s)) => v < s.apply(v),
                _ => true,
            };
            signs.push(if up { Sign::Positive } else { Sign::Negative });
            values.push(if up { tol } else { -tol });
        } else {
            signs.push(if x > T::zero() { Sign::Positive } else { Sign::Negative });
            values.push(x);
        }
    }
    SignField {
        signs,
        values,
        nudged,
        parity: pair.parity,
    }
}

/// A point of the nodal set on edge `edge`, at fraction `t` from its lower
/// vertex to its higher one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCrossing<T> {
    pub edge: usize,
    pub t: T,
}

/// Straight piece of the nodal set inside `triangle`, endpoints in
/// barycentric coordinates of that triangle's vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalSegment<T> {
    pub triangle: usize,
    pub start: [T; 3],
    pub end: [T; 3],
    pub length: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalSet<T> {
    pub crossings: Vec<EdgeCrossing<T>>,
    /// Vertices lying on the nodal set (exact zeros of odd pairs).
    pub zero_vertices: Vec<usize>,
    /// Mesh edges with both endpoints zero; part of the nodal set.
    pub zero_edges: Vec<usize>,
    pub segments: Vec<NodalSegment<T>>,
    pub total_length: T,
    pub nudged: Vec<usize>,
}

impl<T> NodalSet<T> {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

pub fn extract_nodal_set<T: Real>(
    pair: &EigenPair<T>,
    mesh: &SurfaceMesh<T>,
    inv: Option<&Involution>,
) -> Result<NodalSet<T>, NodalError> {
    check_size(pair, mesh)?;
    let field = vertex_signs(pair, inv, T::lit(DEFAULT_VERTEX_ZERO_TOL));
    nodal_set_from_field(&field, mesh)
}

pub(crate) fn nodal_set_from_field<T: Real>(
    field: &SignField<T>,
    mesh: &SurfaceMesh<T>,
) -> Result<NodalSet<T>, NodalError> {
    let signs = &field.signs;
    let vals = &field.values;
    let mut crossing_of = vec![None; mesh.edge_count()];
    let mut crossings = Vec::new();
    let mut zero_edges = Vec::new();
    for (e, key) in mesh.edges().iter().enumerate() {
        match (signs[key.lo], signs[key.hi]) {
            (Sign::Positive, Sign::Negative) | (Sign::Negative, Sign::Positive) => {
                let t = vals[key.lo] / (vals[key.lo] - vals[key.hi]);
                crossing_of[e] = Some(t);
                crossings.push(EdgeCrossing { edge: e, t });
            }
            (Sign::Zero, Sign::Zero) => zero_edges.push(e),
            _ => {}
        }
    }

    let mut segments = Vec::new();
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangle(t);
        let edges = mesh.triangle_edges(t);
        let zeros: Vec<usize> = (0..3).filter(|&k| signs[tri[k]] == Sign::Zero).collect();
        // Point on local edge k = (tri[k], tri[k+1]) in barycentric coordinates.
        let on_edge = |k: usize, frac: T| {
            let key = mesh.edge(edges[k]);
            let from_lo = if tri[k] == key.lo { frac } else { T::one() - frac };
            let mut b = [T::zero(); 3];
            b[k] = T::one() - from_lo;
            b[(k + 1) % 3] = from_lo;
            b
        };
        let corner = |k: usize| {
            let mut b = [T::zero(); 3];
            b[k] = T::one();
            b
        };
        let ends: Vec<[T; 3]> = match zeros.len() {
            0 => (0..3)
                .filter_map(|k| crossing_of[edges[k]].map(|f| on_edge(k, f)))
                .collect(),
            1 => {
                let k = zeros[0];
                let opposite = (k + 1) % 3;
                match crossing_of[edges[opposite]] {
                    Some(f) => vec![corner(k), on_edge(opposite, f)],
                    None => Vec::new(),
                }
            }
            2 => Vec::new(),
            _ => return Err(NodalError::DegenerateZeroTriangle(t)),
        };
        debug_assert!(ends.is_empty() || ends.len() == 2);
        if ends.len() == 2 {
            let length = segment_length(mesh, t, ends[0], ends[1]);
            segments.push(NodalSegment {
                triangle: t,
                start: ends[0],
                end: ends[1],
                length,
            });
        }
    }
    for &e in &zero_edges {
        let t = mesh.edge_triangles(e)[0];
        let tri = mesh.triangle(t);
        let key = mesh.edge(e);
        let mut a = [T::zero(); 3];
        let mut b = [T::zero(); 3];
        a[tri.iter().position(|&x| x == key.lo).unwrap()] = T::one();
        b[tri.iter().position(|&x| x == key.hi).unwrap()] = T::one();
        segments.push(NodalSegment {
            triangle: t,
            start: a,
            end: b,
            length: mesh.edge_length(e),
        });
    }
    let total_length = segments.iter().map(|s| s.length).sum();
    let zero_vertices = (0..signs.len()).filter(|&v| signs[v] == Sign::Zero).collect();
    Ok(NodalSet {
        crossings,
        zero_vertices,
        zero_edges,
        segments,
        total_length,
        nudged: field.nudged.clone(),
    })
}

fn segment_length<T: Real>(mesh: &SurfaceMesh<T>, t: usize, a: [T; 3], b: [T; 3]) -> T {
    let p = mesh.layout(t);
    let point = |w: [T; 3]| {
        [
            w[0] * p[0][0] + w[1] * p[1][0] + w[2] * p[2][0],
            w[0] * p[0][1] + w[1] * p[1][1] + w[2] * p[2][1],
        ]
    };
    let (x, y) = (point(a), point(b));
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
}

/// Nodal domains as components of sign pieces: each triangle contributes
/// one piece per sign present at its vertices, since a linear function's
/// positive (negative) part of a triangle is convex.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalDomains {
    /// `pieces[t][0]` is the domain of the positive part of triangle `t`,
    /// `pieces[t][1]` of the negative part.
    pub pieces: Vec<[Option<usize>; 2]>,
    pub count: usize,
    pub signs: Vec<Sign>,
    /// Number of triangle pieces per domain.
    pub sizes: Vec<usize>,
    /// For even pairs with an involution: whether each domain is mapped to
    /// itself.
    pub inert: Option<Vec<bool>>,
    pub parity: Parity,
}

impl NodalDomains {
    pub fn inert_count(&self) -> Option<usize> {
        self.inert.as_ref().map(|v| v.iter().filter(|&&b| b).count())
    }

    pub fn split_count(&self) -> Option<usize> {
        self.inert.as_ref().map(|v| v.iter().filter(|&&b| !b).count())
    }

    /// Domain of the piece of `t` with sign `sign`.
    pub fn domain_of(&self, t: usize, sign: Sign) -> Option<usize> {
        match sign {
            Sign::Zero => None,
            s => self.pieces[t][s.slot()],
        }
    }
}

pub fn count_nodal_domains<T: Real>(
    pair: &EigenPair<T>,
    mesh: &SurfaceMesh<T>,
    inv: Option<&Involution>,
) -> Result<NodalDomains, NodalError> {
    check_size(pair, mesh)?;
    let field = vertex_signs(pair, inv, T::lit(DEFAULT_VERTEX_ZERO_TOL));
    let (pieces, count) = piece_components(mesh, &field.signs, |_| false)?;
    let mut signs = vec![Sign::Zero; count];
    let mut sizes = vec![0; count];
    for p in &pieces {
        for (slot, d) in p.iter().enumerate() {
            if let Some(d) = *d {
                signs[d] = Sign::from_slot(slot);
                sizes[d] += 1;
            }
        }
    }
    let inert = match (pair.parity, inv) {
        (Parity::Even, Some(s)) => {
            let mut inert = vec![false; count];
            for (t, p) in pieces.iter().enumerate() {
                let image = s.triangle_image(t);
                for slot in 0..2 {
                    if let Some(d) = p[slot] {
                        if pieces[image][slot] == Some(d) {
                            inert[d] = true;
                        }
                    }
                }
            }
            Some(inert)
        }
        _ => None,
    };
    Ok(NodalDomains {
        pieces,
        count,
        signs,
        sizes,
        inert,
        parity: pair.parity,
    })
}

/// Components of sign pieces, merging across every edge that is not `cut`
/// and has an endpoint of the piece's sign.
pub(crate) fn piece_components<T: Real>(
    mesh: &SurfaceMesh<T>,
    signs: &[Sign],
    cut: impl Fn(usize) -> bool,
) -> Result<(Vec<[Option<usize>; 2]>, usize), NodalError> {
    let nt = mesh.triangle_count();
    let mut present = vec![[false; 2]; nt];
    for (t, p) in present.iter_mut().enumerate() {
        let tri = mesh.triangle(t);
        if tri.iter().all(|&v| signs[v] == Sign::Zero) {
            return Err(NodalError::DegenerateZeroTriangle(t));
        }
        for &v in &tri {
            if signs[v] != Sign::Zero {
                p[signs[v].slot()] = true;
            }
        }
    }
    let mut ds = DisjointSets::new(2 * nt);
    for e in 0..mesh.edge_count() {
        if cut(e) {
            continue;
        }
        let key = mesh.edge(e);
        let [a, b] = mesh.edge_triangles(e);
        for s in [signs[key.lo], signs[key.hi]] {
            if s != Sign::Zero {
                ds.union(2 * a + s.slot(), 2 * b + s.slot());
            }
        }
    }
    let mut label = vec![usize::MAX; 2 * nt];
    let mut count = 0;
    let mut pieces = vec![[None; 2]; nt];
    for t in 0..nt {
        for slot in 0..2 {
            if present[t][slot] {
                let root = ds.find(2 * t + slot);
                if label[root] == usize::MAX {
                    label[root] = count;
                    count += 1;
                }
                pieces[t][slot] = Some(label[root]);
            }
        }
    }
    Ok((pieces, count))
}

fn check_size<T: Real>(pair: &EigenPair<T>, mesh: &SurfaceMesh<T>) -> Result<(), NodalError> {
    if pair.coefficients.len() != mesh.vertex_count() {
        return Err(NodalError::SizeMismatch {
            expected: mesh.vertex_count(),
            got: pair.coefficients.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::mesh::gen_flat_torus;

    pub(crate) const TAU: f64 = 2.0 * std::f64::consts::PI;

    /// Grid samples of `f` on the `(2 pi)^2` torus, mass-normalized.
    pub(crate) fn torus_mode(
        n: usize,
        parity: Parity,
        f: impl Fn(f64, f64) -> f64,
    ) -> EigenPair<f64> {
        let h = TAU / n as f64;
        let raw: Vec<f64> = (0..n * n)
            .map(|v| f((v % n) as f64 * h, (v / n) as f64 * h))
            .collect();
        let norm = (raw.iter().map(|x| x * x).sum::<f64>() * h * h).sqrt();
        EigenPair {
            index: 1,
            eigenvalue: 1.0,
            coefficients: raw.iter().map(|x| x / norm).collect(),
            parity,
            residual: 0.0,
        }
    }

    #[test]
    fn cosine_nodal_set_is_two_loops() {
        let n = 16;
        let (mesh, _) = gen_flat_torus(n, TAU, TAU).unwrap();
        let m = torus_mode(n, Parity::Even, |x, _| x.cos());
        let set = extract_nodal_set(&m, &mesh, None).unwrap();
        assert!((set.total_length - 2.0 * TAU).abs() < 0.01 * 2.0 * TAU);
        // Both zero columns were perturbed.
        assert_eq!(set.nudged.len(), 2 * n);
        let d = count_nodal_domains(&m, &mesh, None).unwrap();
        assert_eq!(d.count, 2);
    }

    #[test]
    fn product_sign_pattern_has_four_domains() {
        let n = 16;
        let (mesh, inv) = gen_flat_torus(n, TAU, TAU).unwrap();
        // The sign pattern of cos x cos y translated by a quarter period in y;
        // its zero rows are the fixed rows, where the odd pair vanishes exactly.
        let m = torus_mode(n, Parity::Odd, |x, y| x.cos() * y.sin());
        assert_eq!(count_nodal_domains(&m, &mesh, Some(&inv)).unwrap().count, 4);
        // With all four crossings inside cells the piecewise-linear nodal set
        // cannot cross itself: each saddle joins one diagonal pair of quadrants.
        let generic = torus_mode(n, Parity::Untagged, |x, y| (x + 0.1).cos() * (y + 0.1).cos());
        let count = count_nodal_domains(&generic, &mesh, None).unwrap().count;
        assert!((2..=3).contains(&count));
    }

    #[test]
    fn constant_has_no_nodal_set() {
        let (mesh, _) = gen_flat_torus(8, TAU, TAU).unwrap();
        let m = torus_mode(8, Parity::Even, |_, _| 1.0);
        assert!(extract_nodal_set(&m, &mesh, None).unwrap().is_empty());
        let d = count_nodal_domains(&m, &mesh, None).unwrap();
        assert_eq!(d.count, 1);
        assert_eq!(d.signs, [Sign::Positive]);
    }

    #[test]
    fn odd_mode_keeps_exact_zeros_on_fixed_rows() {
        let n = 16;
        let (mesh, inv) = gen_flat_torus(n, TAU, TAU).unwrap();
        let m = torus_mode(n, Parity::Odd, |_, y| y.sin());
        let set = extract_nodal_set(&m, &mesh, Some(&inv)).unwrap();
        assert_eq!(set.zero_vertices.len(), 2 * n);
        assert_eq!(set.zero_edges.len(), 2 * n);
        assert!(set.crossings.is_empty());
        assert!((set.total_length - 2.0 * TAU).abs() < 1e-12);
        let d = count_nodal_domains(&m, &mesh, Some(&inv)).unwrap();
        assert_eq!(d.count, 2);
        assert!(d.inert.is_none());
    }

    #[test]
    fn even_domains_are_inert_or_paired() {
        let n = 16;
        let (mesh, inv) = gen_flat_torus(n, TAU, TAU).unwrap();
        // cos y: three bands, y in (-pi/2, pi/2) is inert, the band around
        // y = pi too (its own mirror), nothing split.
        let m = torus_mode(n, Parity::Even, |_, y| (y).cos() + 0.3);
        let d = count_nodal_domains(&m, &mesh, Some(&inv)).unwrap();
        assert_eq!(d.count, 2);
        assert_eq!(d.inert_count(), Some(2));
        // cos(2y)-like pattern shifted so the bands at +-pi/2 are swapped.
        let m = torus_mode(n, Parity::Even, |_, y| (2.0 * y).cos() + 0.2);
        let d = count_nodal_domains(&m, &mesh, Some(&inv)).unwrap();
        assert_eq!(d.count, 4);
        assert_eq!(d.inert_count(), Some(2));
        assert_eq!(d.split_count(), Some(2));
    }
}
