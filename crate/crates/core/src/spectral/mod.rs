//! Discrete Laplace spectrum: operator assembly, the generalized symmetric
//! eigensolve and the even/odd split under an involution.

mod operators;
mod parity;
mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::Real;

pub use operators::{assemble_operators, assemble_operators_with, MassKind, OperatorPair};
pub use parity::{solve_with_parity, split_parity, split_parity_with, ParityOptions};
pub use solver::{solve_eigenpairs, solve_eigenpairs_with, SolverOptions, SolverRoute};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("triangle {triangle} has a corner angle within 1e-9 of 0 or pi")]
    NumericallyDegenerate { triangle: usize },
    #[error("requested {k} eigenpairs of a problem of size {n}")]
    BadK { k: usize, n: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("eigensolver did not reach the tolerance in {cycles} cycles (worst residual {worst:e})")]
    NoConvergence { cycles: usize, worst: f64 },
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("eigenvalue cluster at index {index} mixes parities (even weight {even_weight:e}); widen the cluster tolerance")]
    MixedParityResidual { index: usize, even_weight: f64 },
    #[error("eigenpairs and involution disagree on the vertex count")]
    SizeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    /// Not (yet) split under an involution.
    #[serde(rename = "none")]
    Untagged,
}

impl Parity {
    /// Sign of the pullback: `sigma^* v = sign * v`.
    pub fn sign(self) -> Option<i8> {
        match self {
            Parity::Even => Some(1),
            Parity::Odd => Some(-1),
            Parity::Untagged => None,
        }
    }
}

/// Discrete eigenpair, mass-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub index: usize,
    pub eigenvalue: T,
    pub coefficients: Vec<T>,
    pub parity: Parity,
    pub residual: T,
}

impl<T: Real> EigenPair<T> {
    /// Semiclassical parameter `lambda^{-1/2}`; infinite for the constant mode.
    pub fn h(&self) -> T {
        if self.eigenvalue > T::zero() {
            T::one() / self.eigenvalue.sqrt()
        } else {
            T::infinity()
        }
    }
}

/// Largest absolute vertex value.
pub fn sup_norm<T: Real>(pair: &EigenPair<T>) -> T {
    crate::linalg::norm_inf(&pair.coefficients)
}

/// `sup_norm * lambda^{-1/4} * log(lambda)`, the quantity the sup-norm
/// bound for negatively curved surfaces keeps bounded. `None` for
/// `lambda <= 1`.
pub fn sup_norm_ratio<T: Real>(pair: &EigenPair<T>) -> Option<T> {
    let l = pair.eigenvalue;
    (l > T::one()).then(|| sup_norm(pair) * l.powf(T::lit(-0.25)) * l.ln())
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
pub(crate) fn canonical_sign<T: Real>(v: &mut [T]) {
    let mut best = T::zero();
    let mut sign = T::one();
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < T::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}
