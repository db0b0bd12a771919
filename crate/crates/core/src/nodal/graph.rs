use serde::{Deserialize, Serialize};

use super::{
    check_size, piece_components, vertex_signs, NodalDomains, NodalError, Sign,
    DEFAULT_VERTEX_ZERO_TOL,
};
use crate::mesh::{Involution, SurfaceMesh};
use crate::restriction::{restrict, sign_change_positions, CurvePath, TraceKind};
use crate::spectral::{sup_norm, EigenPair, Parity};
use crate::union_find::DisjointSets;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphVertexRole {
    /// Stands in for a closed cycle that carries no other vertex.
    LoopMarker,
    /// Point of the nodal set on the curve (even pairs).
    GammaIntersection,
    /// Meeting point of at least two nodal branches.
    Singular,
    /// Any other branch point.
    Junction,
}

/// Graph on the nodal set (and, for even pairs, the curve), with arcs
/// between branch points as edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalGraph {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub m: usize,
    /// Even: points of the nodal set on the curve. Odd: singular points on
    /// the curve.
    pub n: usize,
    pub parity: Parity,
    pub roles: Vec<GraphVertexRole>,
    pub degrees: Vec<usize>,
}

impl NodalGraph {
    pub fn degree_sum(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn euler_lhs(&self) -> i64 {
        self.v as i64 - self.e as i64 + self.f as i64 - self.m as i64
    }
}

/// `v - e + f - m >= 1 - 2 g`.
pub fn euler_check(graph: &NodalGraph, genus: usize) -> bool {
    graph.euler_lhs() >= 1 - 2 * genus as i64
}

/// Lower bound on the nodal domain count from the graph, and whether the
/// computed count meets it. Odd: `n + 2 - 2g`; even: `n/2 + 1 - g`.
pub fn lemma1_bounds(
    domains: &NodalDomains,
    graph: &NodalGraph,
    genus: usize,
) -> Result<(i64, bool), NodalError> {
    if domains.parity != graph.parity {
        return Err(NodalError::InconsistentInputs);
    }
    let g = genus as i64;
    let n = graph.n as i64;
    let bound = match graph.parity {
        Parity::Odd => n + 2 - 2 * g,
        Parity::Even => n / 2 + 1 - g,
        Parity::Untagged => return Err(NodalError::WrongParity(Parity::Untagged)),
    };
    Ok((bound, domains.count as i64 >= bound))
}

/// Arc-length positions on `path` where the normalized normal derivative of
/// an odd pair changes sign. `zero_tol` defaults to `1e-6` times the sup
/// norm of the pair.
pub fn detect_singular_points<T: Real>(
    pair: &EigenPair<T>,
    mesh: &SurfaceMesh<T>,
    path: &CurvePath<T>,
    zero_tol: Option<T>,
) -> Result<Vec<T>, NodalError> {
    if pair.parity != Parity::Odd {
        return Err(NodalError::WrongParity(pair.parity));
    }
    let trace = restrict(pair, mesh, path, TraceKind::NeumannNormalized)?;
    let tol = zero_tol.unwrap_or(T::lit(1e-6) * sup_norm(pair));
    Ok(sign_change_positions(&trace, tol))
}

/// Builds the nodal graph of a pair of definite parity relative to a loop
/// `path` of the fixed set.
///
/// Graph nodes are the vertices on the nodal set, one point per crossed
/// edge and, for even pairs, the vertices of `path`. Links follow the
/// nodal segments, nodal mesh edges and, for even pairs, the edges of
/// `path`. Nodes of degree two are interior points of arcs; every cycle made
/// only of them gets one marker vertex. Faces are components of the
/// complement, counted over triangle sign pieces.
pub fn build_nodal_graph<T: Real>(
    pair: &EigenPair<T>,
    mesh: &SurfaceMesh<T>,
    inv: &Involution,
    path: &CurvePath<T>,
) -> Result<NodalGraph, NodalError> {
    check_size(pair, mesh)?;
    let even = match pair.parity {
        Parity::Even => true,
        Parity::Odd => false,
        p => return Err(NodalError::WrongParity(p)),
    };
    if let Some(&v) = path.vertices().iter().find(|&&v| !inv.is_fixed(v)) {
        return Err(NodalError::PathNotFixed(v));
    }
    let field = vertex_signs(pair, Some(inv), T::lit(DEFAULT_VERTEX_ZERO_TOL));
    let signs = &field.signs;

    let mut node_count = 0;
    let mut fresh = || {
        node_count += 1;
        node_count - 1
    };
    let mut zero_node = vec![usize::MAX; mesh.vertex_count()];
    for v in 0..mesh.vertex_count() {
        if signs[v] == Sign::Zero {
            zero_node[v] = fresh();
        }
    }
    let mut cross_node = vec![usize::MAX; mesh.edge_count()];
    for (e, key) in mesh.edges().iter().enumerate() {
        let (a, b) = (signs[key.lo], signs[key.hi]);
        if a != Sign::Zero && b != Sign::Zero && a != b {
            cross_node[e] = fresh();
        }
    }
    let mut path_edge = vec![false; mesh.edge_count()];
    let pv = path.vertices();
    for i in 0..pv.len() {
        let e = mesh.edge_index(pv[i], pv[(i + 1) % pv.len()]).unwrap();
        path_edge[e] = true;
    }
    let mut gamma_node = vec![usize::MAX; mesh.vertex_count()];
    if even {
        for &v in pv {
            gamma_node[v] = fresh();
        }
    }

    let mut links: Vec<(usize, usize)> = Vec::new();
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangle(t);
        let edges = mesh.triangle_edges(t);
        let zeros: Vec<usize> = (0..3).filter(|&k| signs[tri[k]] == Sign::Zero).collect();
        match zeros.len() {
            0 => {
                let crossed: Vec<usize> = edges
                    .iter()
                    .filter(|&&e| cross_node[e] != usize::MAX)
                    .map(|&e| cross_node[e])
                    .collect();
                if crossed.len() == 2 {
                    links.push((crossed[0], crossed[1]));
                }
            }
            1 => {
                let k = zeros[0];
                let opposite = edges[(k + 1) % 3];
                if cross_node[opposite] != usize::MAX {
                    links.push((zero_node[tri[k]], cross_node[opposite]));
                }
            }
            2 => {}
            _ => return Err(NodalError::DegenerateZeroTriangle(t)),
        }
    }
    for key in mesh.edges() {
        if signs[key.lo] == Sign::Zero && signs[key.hi] == Sign::Zero {
            links.push((zero_node[key.lo], zero_node[key.hi]));
        }
    }
    let mut n = 0;
    if even {
        for i in 0..pv.len() {
            let (a, b) = (pv[i], pv[(i + 1) % pv.len()]);
            let e = mesh.edge_index(a, b).unwrap();
            if cross_node[e] != usize::MAX {
                links.push((gamma_node[a], cross_node[e]));
                links.push((cross_node[e], gamma_node[b]));
                n += 1;
            } else {
                links.push((gamma_node[a], gamma_node[b]));
            }
        }
    }

    let mut degree = vec![0usize; node_count];
    let mut ds = DisjointSets::new(node_count);
    for &(a, b) in &links {
        degree[a] += 1;
        degree[b] += 1;
        ds.union(a, b);
    }
    let (labels, components) = ds.labels();
    let mut all_degree_two = vec![true; components];
    for node in 0..node_count {
        if degree[node] != 2 {
            all_degree_two[labels[node]] = false;
        }
    }

    let on_path: Vec<bool> = {
        let mut mark = vec![false; mesh.vertex_count()];
        for &v in pv {
            mark[v] = true;
        }
        mark
    };
    let mut roles = Vec::new();
    let mut degrees = Vec::new();
    for v in 0..mesh.vertex_count() {
        let node = zero_node[v];
        if node != usize::MAX && degree[node] != 2 {
            roles.push(if degree[node] >= 4 {
                GraphVertexRole::Singular
            } else {
                GraphVertexRole::Junction
            });
            degrees.push(degree[node]);
            if !even && on_path[v] && degree[node] >= 4 {
                n += 1;
            }
        }
    }
    for e in 0..mesh.edge_count() {
        let node = cross_node[e];
        if node != usize::MAX && degree[node] != 2 {
            roles.push(if even && path_edge[e] && degree[node] >= 4 {
                GraphVertexRole::GammaIntersection
            } else {
                GraphVertexRole::Junction
            });
            degrees.push(degree[node]);
        }
    }
    for &v in pv {
        let node = gamma_node[v];
        if node != usize::MAX && degree[node] != 2 {
            roles.push(GraphVertexRole::Junction);
            degrees.push(degree[node]);
        }
    }
    let pure_cycles = all_degree_two.iter().filter(|&&b| b).count();
    for _ in 0..pure_cycles {
        roles.push(GraphVertexRole::LoopMarker);
        degrees.push(2);
    }
    let v = roles.len();
    let e = degrees.iter().sum::<usize>() / 2;

    let (_, f) = piece_components(mesh, signs, |e| even && path_edge[e])?;

    Ok(NodalGraph {
        v,
        e,
        f,
        m: components,
        n,
        parity: pair.parity,
        roles,
        degrees,
    })
}
