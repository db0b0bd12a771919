use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::linalg::CsrMatrix;
use crate::mesh::SurfaceMesh;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassKind {
    /// Diagonal, one third of each incident triangle's area per vertex.
    #[default]
    Lumped,
    /// Galerkin mass of the piecewise-linear basis.
    Consistent,
}

/// Cotangent stiffness and mass matrix of the piecewise-linear Laplacian.
#[derive(Debug, Clone)]
pub struct OperatorPair<T> {
    pub stiffness: CsrMatrix<T>,
    pub mass: CsrMatrix<T>,
    pub mass_kind: MassKind,
    lumped: Vec<T>,
}

impl<T: Real> OperatorPair<T> {
    pub fn n(&self) -> usize {
        self.stiffness.n()
    }

    /// Lumped mass diagonal; equals `mass` when `mass_kind` is lumped. Used
    /// as the norm weight for residuals in either case.
    pub fn lumped_mass(&self) -> &[T] {
        &self.lumped
    }

    pub fn mass_inner(&self, x: &[T], y: &[T]) -> T {
        match self.mass_kind {
            MassKind::Lumped => {
                let mut acc = T::zero();
                for ((&m, &a), &b) in self.lumped.iter().zip(x).zip(y) {
                    acc += m * a * b;
                }
                acc
            }
            MassKind::Consistent => self.mass.bilinear(x, y),
        }
    }

    pub fn apply_mass(&self, x: &[T]) -> Vec<T> {
        match self.mass_kind {
            MassKind::Lumped => self.lumped.iter().zip(x).map(|(&m, &a)| m * a).collect(),
            MassKind::Consistent => self.mass.mul_vec(x),
        }
    }

    /// `||S v - lambda M v||` in the inverse lumped-mass norm, divided by
    /// `max(lambda, 1e-4 rho)` with `rho = max S_ii / M_ii`.
    pub fn relative_residual(&self, v: &[T], lambda: T) -> T {
        let sv = self.stiffness.mul_vec(v);
        let mv = self.apply_mass(v);
        let mut acc = T::zero();
        for i in 0..v.len() {
            let r = sv[i] - lambda * mv[i];
            acc += r * r / self.lumped[i];
        }
        acc.sqrt() / lambda.max(T::lit(1e-4) * self.spectral_scale())
    }

    /// `max S_ii / M_ii`, a proxy for the top of the discrete spectrum.
    pub fn spectral_scale(&self) -> T {
        self.stiffness
            .diagonal()
            .iter()
            .zip(&self.lumped)
            .map(|(&s, &m)| s / m)
            .fold(T::zero(), T::max)
    }
}

pub fn assemble_operators<T: Real>(mesh: &SurfaceMesh<T>) -> Result<OperatorPair<T>, SpectralError> {
    assemble_operators_with(mesh, MassKind::Lumped)
}

pub fn assemble_operators_with<T: Real>(
    mesh: &SurfaceMesh<T>,
    mass_kind: MassKind,
) -> Result<OperatorPair<T>, SpectralError> {
    let n = mesh.vertex_count();
    let limit = T::lit(1e-9);
    let mut stiff = Vec::with_capacity(12 * mesh.triangle_count());
    let mut mass = Vec::new();
    let mut lumped = vec![T::zero(); n];
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangle(t);
        let [a, b, c] = mesh.opposite_lengths(t);
        let four_area = T::lit(4.0) * mesh.area(t);
        let opp = [a, b, c];
        for k in 0..3 {
            let (x, y, z) = (opp[k], opp[(k + 1) % 3], opp[(k + 2) % 3]);
            let num = y * y + z * z - x * x;
            let angle = four_area.atan2(num);
            if angle < limit || angle > T::PI() - limit {
                return Err(SpectralError::NumericallyDegenerate { triangle: t });
            }
            let w = T::lit(0.5) * num / four_area;
            let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            stiff.push((i, i, w));
            stiff.push((j, j, w));
            stiff.push((i, j, -w));
            stiff.push((j, i, -w));
        }
        let area = mesh.area(t);
        let third = area / T::lit(3.0);
        for &v in &tri {
            lumped[v] += third;
        }
        if mass_kind == MassKind::Consistent {
            let diag = area / T::lit(6.0);
            let off = area / T::lit(12.0);
            for &i in &tri {
                for &j in &tri {
                    mass.push((i, j, if i == j { diag } else { off }));
                }
            }
        }
    }
    let mass = match mass_kind {
        MassKind::Lumped => CsrMatrix::from_diagonal(&lumped),
        MassKind::Consistent => CsrMatrix::from_triplets(n, mass),
    };
    Ok(OperatorPair {
        stiffness: CsrMatrix::from_triplets(n, stiff),
        mass,
        mass_kind,
        lumped,
    })
}
