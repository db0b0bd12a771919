use super::conformal::prescribe_angle_sums;
use super::{validate_involution, EdgeKey, EdgeLengths, Involution, MeshError, SurfaceMesh};
use crate::Real;

/// Flat `l1 x l2` torus on an `n x n` grid with the reflection
/// `(x, y) -> (x, -y)`.
///
/// Vertex `(i, j)` sits at `(i l1 / n, j l2 / n)` and has index `i + n j`.
/// Cell diagonals alternate with the row parity, which is exactly what
/// makes the reflection simplicial.
pub fn gen_flat_torus<T: Real>(
    n: usize,
    l1: T,
    l2: T,
) -> Result<(SurfaceMesh<T>, Involution), MeshError> {
    if n < 4 || n % 2 != 0 {
        return Err(MeshError::BadResolution(n));
    }
    let id = |i: usize, j: usize| (i % n) + n * (j % n);
    let hx = l1 / T::from_usize_lossy(n);
    let hy = l2 / T::from_usize_lossy(n);
    let diag = (hx * hx + hy * hy).sqrt();
    let mut tris = Vec::with_capacity(2 * n * n);
    let mut lengths = EdgeLengths::new();
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            lengths.insert(EdgeKey::new(a, b), hx);
            lengths.insert(EdgeKey::new(a, d), hy);
            if j % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
                lengths.insert(EdgeKey::new(a, c), diag);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
                lengths.insert(EdgeKey::new(b, d), diag);
            }
        }
    }
    let mesh = SurfaceMesh::new(n * n, tris, &lengths)?;
    let perm: Vec<usize> = (0..n * n).map(|v| id(v % n, n - v / n)).collect();
    let inv = validate_involution(&mesh, &perm)?;
    Ok((mesh, inv))
}

/// Fixed-point-free glide `(x, y) -> (x + l1/2, -y)` on the
/// [`gen_flat_torus`] grid of the same `n`.
pub fn flat_torus_glide(n: usize) -> Vec<usize> {
    (0..n * n)
        .map(|v| (v % n + n / 2) % n + n * ((n - v / n) % n))
        .collect()
}

/// Metric placed on the doubled one-holed torus by [`gen_genus2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Genus2Metric {
    /// Discrete conformal rescaling of the grid metric with every vertex
    /// angle sum equal to `2 pi + 4 pi / V`.
    #[default]
    UniformCurvature,
    /// The unit grid metric itself: flat except at the eight hole corners.
    Grid,
}

/// Genus-two surface obtained by doubling a one-holed torus along its
/// boundary loop, with the swap of the two copies as involution.
///
/// The one-holed torus is a `6 * 2^subdiv` square grid torus with a
/// square hole of a third of the side. The boundary loop is the fixed
/// set. Lengths are rescaled conformally (symmetrically under the swap)
/// until every vertex carries the same negative curvature, then scaled to
/// total area `4 pi`.
pub fn gen_genus2<T: Real>(subdiv: u32) -> Result<(SurfaceMesh<T>, Involution), MeshError> {
    gen_genus2_with(subdiv, Genus2Metric::default())
}

pub fn gen_genus2_with<T: Real>(
    subdiv: u32,
    metric: Genus2Metric,
) -> Result<(SurfaceMesh<T>, Involution), MeshError> {
    let n = 6usize
        .checked_shl(subdiv)
        .filter(|&n| n <= 1 << 12)
        .ok_or(MeshError::BadResolution(usize::MAX))?;
    let hole = n / 3;
    let removed = |i: usize, j: usize| 0 < i && i < hole && 0 < j && j < hole;
    let on_boundary = |i: usize, j: usize| i <= hole && j <= hole && !removed(i, j);

    let mut id_a = vec![usize::MAX; n * n];
    let mut grid_pos = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !removed(i, j) {
                id_a[i + n * j] = grid_pos.len();
                grid_pos.push((i, j));
            }
        }
    }
    let count_a = grid_pos.len();
    let mut id_b = vec![usize::MAX; count_a];
    let mut next = count_a;
    for (k, &(i, j)) in grid_pos.iter().enumerate() {
        if on_boundary(i, j) {
            id_b[k] = k;
        } else {
            id_b[k] = next;
            next += 1;
        }
    }
    let vertex_count = next;

    let p = |i: usize, j: usize| id_a[(i % n) + n * (j % n)];
    let mut tris_a = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i < hole && j < hole {
                continue;
            }
            let (a, b, c, d) = (p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
            if (i + j) % 2 == 0 {
                tris_a.push([a, b, c]);
                tris_a.push([a, c, d]);
            } else {
                tris_a.push([a, b, d]);
                tris_a.push([b, c, d]);
            }
        }
    }
    let mut tris = tris_a.clone();
    tris.extend(tris_a.iter().map(|&[a, b, c]| [id_b[a], id_b[c], id_b[b]]));

    let mut perm: Vec<usize> = (0..vertex_count).collect();
    for k in 0..count_a {
        perm[k] = id_b[k];
        perm[id_b[k]] = k;
    }

    let mut cell_pos = vec![(0usize, 0usize); vertex_count];
    for (k, &ij) in grid_pos.iter().enumerate() {
        cell_pos[k] = ij;
        cell_pos[id_b[k]] = ij;
    }
    let wrap = |d: isize| -> f64 {
        let n = n as isize;
        (((d + n / 2).rem_euclid(n)) - n / 2) as f64
    };
    let mut base: EdgeLengths<f64> = EdgeLengths::new();
    for t in &tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let (pa, pb) = (cell_pos[a], cell_pos[b]);
            let dx = wrap(pb.0 as isize - pa.0 as isize);
            let dy = wrap(pb.1 as isize - pa.1 as isize);
            base.insert(EdgeKey::new(a, b), dx.hypot(dy));
        }
    }

    let lengths64 = match metric {
        Genus2Metric::Grid => base,
        Genus2Metric::UniformCurvature => {
            let target = 2.0 * std::f64::consts::PI * (1.0 + 2.0 / vertex_count as f64);
            prescribe_angle_sums(vertex_count, &tris, &base, &perm, target)?
        }
    };
    let mesh64 = SurfaceMesh::<f64>::new(vertex_count, tris.clone(), &lengths64)?;
    let scale = (4.0 * std::f64::consts::PI / mesh64.total_area()).sqrt();
    let lengths: EdgeLengths<T> = lengths64
        .iter()
        .map(|(&e, &l)| (e, T::lit(l * scale)))
        .collect();
    let mesh = SurfaceMesh::new(vertex_count, tris, &lengths)?;
    let inv = validate_involution(&mesh, &perm)?;
    Ok((mesh, inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixed_point_set;

    #[test]
    fn small_torus_counts_and_area() {
        let tau = 2.0 * std::f64::consts::PI;
        let (mesh, _) = gen_flat_torus(4, tau, tau).unwrap();
        assert_eq!(mesh.vertex_count(), 16);
        assert_eq!(mesh.triangle_count(), 32);
        assert_eq!(mesh.genus(), 1);
        assert!((mesh.total_area() - tau * tau).abs() < 1e-12);
    }

    #[test]
    fn odd_or_tiny_resolution_is_rejected() {
        assert_eq!(
            gen_flat_torus(5, 1.0, 1.0).unwrap_err(),
            MeshError::BadResolution(5)
        );
        assert_eq!(
            gen_flat_torus(2, 1.0, 1.0).unwrap_err(),
            MeshError::BadResolution(2)
        );
    }

    #[test]
    fn genus2_counts() {
        let (mesh, _) = gen_genus2::<f64>(0).unwrap();
        // 6x6 torus minus one interior hole vertex, doubled along 8 boundary vertices.
        assert_eq!(mesh.vertex_count(), 62);
        let e = mesh.edge_count() as i64;
        let f = mesh.triangle_count() as i64;
        assert_eq!(62 - e + f, -2);
        assert_eq!(mesh.genus(), 2);
        assert!((mesh.total_area() - 4.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn genus2_is_negatively_curved_everywhere() {
        for s in 0..2 {
            let (mesh, inv) = gen_genus2::<f64>(s).unwrap();
            let two_pi = 2.0 * std::f64::consts::PI;
            for v in 0..mesh.vertex_count() {
                assert!(mesh.angle_sum(v) > two_pi + 1e-3, "vertex {v} at level {s}");
            }
            let fixed = fixed_point_set(&mesh, &inv).unwrap();
            assert_eq!(fixed.components.len(), 1);
            assert!(fixed.separating);
        }
    }

    #[test]
    fn grid_metric_is_flat_away_from_hole_corners() {
        let (mesh, _) = gen_genus2_with::<f64>(0, Genus2Metric::Grid).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let curved = (0..mesh.vertex_count())
            .filter(|&v| (mesh.angle_sum(v) - two_pi).abs() > 1e-9)
            .count();
        assert_eq!(curved, 4);
    }
}
