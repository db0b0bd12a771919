use super::{Involution, MeshError, SurfaceMesh};
use crate::union_find::DisjointSets;
use crate::Real;

/// Closed edge path given by its cyclic vertex list (first vertex not repeated).
pub type CurveLoop = Vec<usize>;

/// Fixed-point set of an involution, organized into simple closed loops.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedCurve<T> {
    /// Each loop starts at its smallest vertex and continues toward the
    /// smaller of that vertex's two neighbours; loops are sorted.
    pub components: Vec<CurveLoop>,
    /// `arc_lengths[c][i]` is the length of edge `(c[i], c[i+1])`, cyclically.
    pub arc_lengths: Vec<Vec<T>>,
    pub separating: bool,
}

impl<T: Real> FixedCurve<T> {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn total_length(&self) -> T {
        self.arc_lengths.iter().flatten().copied().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub fn fixed_point_set<T: Real>(
    mesh: &SurfaceMesh<T>,
    inv: &Involution,
) -> Result<FixedCurve<T>, MeshError> {
    let n = mesh.vertex_count();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in mesh.edges() {
        if inv.is_fixed(e.lo) && inv.is_fixed(e.hi) {
            nbrs[e.lo].push(e.hi);
            nbrs[e.hi].push(e.lo);
        }
    }
    let mut visited = vec![false; n];
    let mut components = Vec::new();
    for start in inv.fixed_vertices() {
        if visited[start] {
            continue;
        }
        if nbrs[start].len() != 2 {
            return Err(MeshError::FixedSetNotCurve(start));
        }
        let mut cycle = vec![start];
        visited[start] = true;
        let mut prev = start;
        let mut cur = *nbrs[start].iter().min().unwrap();
        while cur != start {
            if nbrs[cur].len() != 2 || visited[cur] {
                return Err(MeshError::FixedSetNotCurve(cur));
            }
            visited[cur] = true;
            cycle.push(cur);
            let next = if nbrs[cur][0] == prev { nbrs[cur][1] } else { nbrs[cur][0] };
            prev = cur;
            cur = next;
        }
        components.push(cycle);
    }
    // Fixed vertices are visited in increasing order, so every loop already
    // starts at its minimum and the list is sorted.
    let arc_lengths = components
        .iter()
        .map(|c| loop_edge_lengths(mesh, c))
        .collect();
    let separating = is_separating(mesh, &components, Some(inv));
    Ok(FixedCurve {
        components,
        arc_lengths,
        separating,
    })
}

fn loop_edge_lengths<T: Real>(mesh: &SurfaceMesh<T>, cycle: &[usize]) -> Vec<T> {
    (0..cycle.len())
        .map(|i| {
            mesh.length_between(cycle[i], cycle[(i + 1) % cycle.len()])
                .expect("loop follows mesh edges")
        })
        .collect()
}

/// Whether cutting along `loops` disconnects the surface. With an
/// involution, additionally requires that no piece of the complement is
/// mapped to itself, i.e. the pieces are exchanged.
pub fn is_separating<T: Real>(
    mesh: &SurfaceMesh<T>,
    loops: &[CurveLoop],
    inv: Option<&Involution>,
) -> bool {
    let mut cut = vec![false; mesh.edge_count()];
    for c in loops {
        for i in 0..c.len() {
            if let Some(e) = mesh.edge_index(c[i], c[(i + 1) % c.len()]) {
                cut[e] = true;
            }
        }
    }
    let mut ds = DisjointSets::new(mesh.triangle_count());
    for e in 0..mesh.edge_count() {
        if !cut[e] {
            let [a, b] = mesh.edge_triangles(e);
            ds.union(a, b);
        }
    }
    let (labels, count) = ds.labels();
    if count < 2 {
        return false;
    }
    match inv {
        None => true,
        Some(inv) => (0..mesh.triangle_count())
            .all(|t| labels[t] != labels[inv.triangle_image(t)]),
    }
}
