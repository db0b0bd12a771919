use super::{MeshError, SurfaceMesh};
use crate::Real;

/// Certified orientation-reversing isometric involution of a mesh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    perm: Vec<usize>,
    triangle_map: Vec<usize>,
    edge_map: Vec<usize>,
}

impl Involution {
    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.perm[v]
    }

    #[inline]
    pub fn vertex_map(&self) -> &[usize] {
        &self.perm
    }

    #[inline]
    pub fn triangle_image(&self, t: usize) -> usize {
        self.triangle_map[t]
    }

    #[inline]
    pub fn edge_image(&self, e: usize) -> usize {
        self.edge_map[e]
    }

    #[inline]
    pub fn is_fixed(&self, v: usize) -> bool {
        self.perm[v] == v
    }

    pub fn fixed_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.perm.len()).filter(move |&v| self.perm[v] == v)
    }

    /// Pullback `(sigma^* f)(v) = f(sigma(v))`.
    pub fn pull_back<T: Copy>(&self, f: &[T]) -> Vec<T> {
        self.perm.iter().map(|&w| f[w]).collect()
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

/// Checks that `perm` is an orientation-reversing isometric involution of
/// `mesh` and that its fixed vertices lie on fixed edges only.
pub fn validate_involution<T: Real>(
    mesh: &SurfaceMesh<T>,
    perm: &[usize],
) -> Result<Involution, MeshError> {
    let n = mesh.vertex_count();
    if perm.len() != n {
        return Err(MeshError::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(MeshError::NotAPermutation(n));
        }
        seen[p] = true;
    }
    if let Some(v) = (0..n).find(|&v| perm[perm[v]] != v) {
        return Err(MeshError::NotInvolutive(v));
    }

    let mut triangle_map = Vec::with_capacity(mesh.triangle_count());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let image = tri.map(|v| perm[v]);
        let s = mesh.find_triangle(image).ok_or(MeshError::NotSimplicial(t))?;
        if same_cyclic_order(mesh.triangle(s), image) {
            return Err(MeshError::OrientationPreserving(t));
        }
        triangle_map.push(s);
    }

    let mut edge_map = Vec::with_capacity(mesh.edge_count());
    for (e, key) in mesh.edges().iter().enumerate() {
        let image = mesh
            .edge_index(perm[key.lo], perm[key.hi])
            .ok_or(MeshError::NotSimplicial(mesh.edge_triangles(e)[0]))?;
        let (a, b) = (mesh.edge_length(e), mesh.edge_length(image));
        if (a - b).abs() > T::lit(64.0) * T::epsilon() * a.max(b) {
            return Err(MeshError::NotIsometric(key.lo, key.hi));
        }
        // A flipped edge has a fixed midpoint off the vertex set.
        if image == e && perm[key.lo] == key.hi {
            return Err(MeshError::FixedSetNotCurve(key.lo));
        }
        edge_map.push(image);
    }

    Ok(Involution {
        perm: perm.to_vec(),
        triangle_map,
        edge_map,
    })
}

fn same_cyclic_order(a: [usize; 3], b: [usize; 3]) -> bool {
    (0..3).any(|r| a[0] == b[r] && a[1] == b[(r + 1) % 3] && a[2] == b[(r + 2) % 3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gen_flat_torus;

    #[test]
    fn identity_preserves_orientation() {
        let (mesh, _) = gen_flat_torus::<f64>(4, 1.0, 1.0).unwrap();
        let id: Vec<usize> = (0..mesh.vertex_count()).collect();
        assert!(matches!(
            validate_involution(&mesh, &id),
            Err(MeshError::OrientationPreserving(_))
        ));
    }

    #[test]
    fn three_cycle_is_not_involutive() {
        let (mesh, _) = gen_flat_torus::<f64>(4, 1.0, 1.0).unwrap();
        let mut p: Vec<usize> = (0..mesh.vertex_count()).collect();
        p[0] = 1;
        p[1] = 2;
        p[2] = 0;
        assert_eq!(validate_involution(&mesh, &p), Err(MeshError::NotInvolutive(0)));
    }

    #[test]
    fn reflection_squares_to_identity_and_reverses_triangles() {
        let (mesh, inv) = gen_flat_torus::<f64>(6, 2.0, 3.0).unwrap();
        for v in 0..mesh.vertex_count() {
            assert_eq!(inv.apply(inv.apply(v)), v);
        }
        for t in 0..mesh.triangle_count() {
            let image = mesh.triangle(t).map(|v| inv.apply(v));
            let s = mesh.triangle(inv.triangle_image(t));
            assert!(same_cyclic_order(s, [image[2], image[1], image[0]]));
        }
    }

    #[test]
    fn stretched_edge_is_not_isometric() {
        let (mesh, inv) = gen_flat_torus::<f64>(4, 1.0, 1.0).unwrap();
        let mut lengths = mesh.length_map();
        // Vertical edge from row 0 to row 1 at column 0; its mirror goes to row 3.
        let key = crate::mesh::EdgeKey::new(0, 4);
        *lengths.get_mut(&key).unwrap() *= 1.01;
        let warped = SurfaceMesh::new(16, mesh.triangles().to_vec(), &lengths).unwrap();
        assert!(matches!(
            validate_involution(&warped, inv.vertex_map()),
            Err(MeshError::NotIsometric(..))
        ));
    }
}
