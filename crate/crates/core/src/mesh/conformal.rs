//! Discrete conformal rescaling `l_ij = l0_ij exp((u_i + u_j) / 2)` with
//! prescribed vertex angle sums, by Newton's method on the conformal
//! factors.

use super::{corner_angle, EdgeKey, EdgeLengths, MeshError};
use crate::linalg::{CsrMatrix, EnvelopeCholesky};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalOptions {
    pub max_iterations: usize,
    /// Stop when every angle sum is within this of its target.
    pub tolerance: f64,
}

impl Default for ConformalOptions {
    fn default() -> Self {
        Self {
            max_iterations: 60,
            tolerance: 1e-11,
        }
    }
}

/// Finds conformal factors giving every vertex total angle `target`, kept
/// symmetric under the vertex permutation `symmetry`. Gauss-Bonnet must
/// be compatible with `target`, otherwise Newton stalls and an error is
/// returned.
pub fn prescribe_angle_sums(
    vertex_count: usize,
    triangles: &[[usize; 3]],
    base: &EdgeLengths<f64>,
    symmetry: &[usize],
    target: f64,
) -> Result<EdgeLengths<f64>, MeshError> {
    prescribe_angle_sums_with(
        vertex_count,
        triangles,
        base,
        symmetry,
        target,
        ConformalOptions::default(),
    )
}

pub fn prescribe_angle_sums_with(
    vertex_count: usize,
    triangles: &[[usize; 3]],
    base: &EdgeLengths<f64>,
    symmetry: &[usize],
    target: f64,
    options: ConformalOptions,
) -> Result<EdgeLengths<f64>, MeshError> {
    let mut u = vec![0.0; vertex_count];
    let mut state = evaluate(triangles, base, &u, vertex_count)
        .ok_or_else(|| MeshError::Metric("initial lengths violate the triangle inequality".into()))?;
    let mut err = max_defect(&state.angle_sums, target);
    for _ in 0..options.max_iterations {
        if err < options.tolerance {
            return Ok(scaled(base, &u));
        }
        let residual: Vec<f64> = state.angle_sums.iter().map(|&t| t - target).collect();
        let max_diag = state.laplacian.diagonal().into_iter().fold(0.0, f64::max);
        let shift = CsrMatrix::from_diagonal(&vec![1e-10 * max_diag; vertex_count]);
        let factor = EnvelopeCholesky::factor(&state.laplacian.add_scaled(&shift, 1.0))
            .map_err(|e| MeshError::Metric(e.to_string()))?;
        let mut du = factor.solve(&residual);
        symmetrize(&mut du, symmetry);

        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + step * b).collect();
            if let Some(next) = evaluate(triangles, base, &trial, vertex_count) {
                let next_err = max_defect(&next.angle_sums, target);
                if next_err < err {
                    u = trial;
                    state = next;
                    err = next_err;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-8 {
                return Err(MeshError::Metric(format!(
                    "conformal Newton stalled at angle defect {err:e}"
                )));
            }
        }
    }
    if err < options.tolerance {
        Ok(scaled(base, &u))
    } else {
        Err(MeshError::Metric(format!(
            "conformal Newton did not converge (defect {err:e})"
        )))
    }
}

struct State {
    angle_sums: Vec<f64>,
    laplacian: CsrMatrix<f64>,
}

fn scaled_length(base: &EdgeLengths<f64>, u: &[f64], a: usize, b: usize) -> f64 {
    base[&EdgeKey::new(a, b)] * (0.5 * (u[a] + u[b])).exp()
}

fn scaled(base: &EdgeLengths<f64>, u: &[f64]) -> EdgeLengths<f64> {
    base.iter()
        .map(|(&e, &l)| (e, l * (0.5 * (u[e.lo] + u[e.hi])).exp()))
        .collect()
}

/// Angle sums and the cotangent Laplacian, which is minus the Jacobian of
/// the angle sums with respect to `u`.
fn evaluate(
    triangles: &[[usize; 3]],
    base: &EdgeLengths<f64>,
    u: &[f64],
    vertex_count: usize,
) -> Option<State> {
    let mut angle_sums = vec![0.0; vertex_count];
    let mut triplets = Vec::with_capacity(12 * triangles.len());
    for t in triangles {
        let opp = [
            scaled_length(base, u, t[1], t[2]),
            scaled_length(base, u, t[2], t[0]),
            scaled_length(base, u, t[0], t[1]),
        ];
        for k in 0..3 {
            let (a, b, c) = (opp[k], opp[(k + 1) % 3], opp[(k + 2) % 3]);
            if !(a < b + c && b < a + c && c < a + b) {
                return None;
            }
        }
        for k in 0..3 {
            let angle = corner_angle(opp[k], opp[(k + 1) % 3], opp[(k + 2) % 3]);
            angle_sums[t[k]] += angle;
            let w = 0.5 / angle.tan();
            let (i, j) = (t[(k + 1) % 3], t[(k + 2) % 3]);
            triplets.push((i, i, w));
            triplets.push((j, j, w));
            triplets.push((i, j, -w));
            triplets.push((j, i, -w));
        }
    }
    Some(State {
        angle_sums,
        laplacian: CsrMatrix::from_triplets(vertex_count, triplets),
    })
}

fn max_defect(sums: &[f64], target: f64) -> f64 {
    sums.iter().map(|s| (s - target).abs()).fold(0.0, f64::max)
}

fn symmetrize(x: &mut [f64], perm: &[usize]) {
    let y: Vec<f64> = perm.iter().map(|&p| x[p]).collect();
    for (a, b) in x.iter_mut().zip(y) {
        *a = 0.5 * (*a + b);
    }
}
