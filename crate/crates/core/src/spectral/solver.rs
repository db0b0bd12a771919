use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{canonical_sign, EigenPair, MassKind, OperatorPair, Parity, SpectralError};
use crate::linalg::{dense_cholesky, dot, CsrMatrix, DenseMatrix, EnvelopeCholesky, SymmetricEigen};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverRoute {
    /// Dense below `dense_threshold` vertices, shift-invert above.
    #[default]
    Auto,
    Dense,
    ShiftInvert,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Bound on the relative residual of every returned pair.
    pub tol: f64,
    pub seed: u64,
    pub route: SolverRoute,
    pub dense_threshold: usize,
    pub max_cycles: usize,
    /// Krylov expansion steps per restart cycle.
    pub depth: usize,
    /// Block size beyond `k`; `None` picks `max(k / 2, 8)`.
    pub extra: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            seed: 0x5eed,
            route: SolverRoute::Auto,
            dense_threshold: 400,
            max_cycles: 200,
            depth: 2,
            extra: None,
        }
    }
}

/// The `k` smallest eigenpairs of `S v = lambda M v`.
pub fn solve_eigenpairs<T: Real>(
    ops: &OperatorPair<T>,
    k: usize,
    tol: f64,
) -> Result<Vec<EigenPair<T>>, SpectralError> {
    solve_eigenpairs_with(
        ops,
        k,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_eigenpairs_with<T: Real>(
    ops: &OperatorPair<T>,
    k: usize,
    options: &SolverOptions,
) -> Result<Vec<EigenPair<T>>, SpectralError> {
    let n = ops.n();
    if k == 0 || k >= n {
        return Err(SpectralError::BadK { k, n });
    }
    if !(options.tol > 0.0) {
        return Err(SpectralError::BadTolerance);
    }
    let block = (k + options.extra.unwrap_or((k / 2).max(8))).min(n);
    let dense = match options.route {
        SolverRoute::Dense => true,
        SolverRoute::ShiftInvert => false,
        SolverRoute::Auto => n <= options.dense_threshold || 2 * block * (options.depth + 1) >= n,
    };
    let (values, vectors) = if dense {
        dense_route(ops, k)?
    } else {
        krylov_route(ops, k, block, options)?
    };
    let tol = T::lit(options.tol);
    let mut pairs = Vec::with_capacity(k);
    for (index, (lambda, mut v)) in values.into_iter().zip(vectors).enumerate() {
        canonical_sign(&mut v);
        let lambda = lambda.max(T::zero());
        let residual = ops.relative_residual(&v, lambda);
        if !(residual <= tol) {
            return Err(SpectralError::NoConvergence {
                cycles: 0,
                worst: residual.as_f64(),
            });
        }
        pairs.push(EigenPair {
            index,
            eigenvalue: lambda,
            coefficients: v,
            parity: Parity::Untagged,
            residual,
        });
    }
    Ok(pairs)
}

type Spectrum<T> = (Vec<T>, Vec<Vec<T>>);

/// Reduction to a standard dense symmetric problem.
fn dense_route<T: Real>(ops: &OperatorPair<T>, k: usize) -> Result<Spectrum<T>, SpectralError> {
    let n = ops.n();
    let s = densify(&ops.stiffness);
    match ops.mass_kind {
        MassKind::Lumped => {
            let d: Vec<T> = ops.lumped_mass().iter().map(|m| T::one() / m.sqrt()).collect();
            let mut c = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    c.set(i, j, d[i] * s.get(i, j) * d[j]);
                }
            }
            let eig = SymmetricEigen::new(&c)?;
            let vectors = (0..k)
                .map(|c| eig.vector(c).iter().zip(&d).map(|(&y, &di)| y * di).collect())
                .collect();
            Ok((eig.values[..k].to_vec(), vectors))
        }
        MassKind::Consistent => {
            let l = dense_cholesky(&densify(&ops.mass))?;
            // X = L^{-1} S, then C = L^{-1} X^T = L^{-1} S L^{-T}.
            let mut x = DenseMatrix::zeros(n);
            for col in 0..n {
                let b: Vec<T> = (0..n).map(|i| s.get(i, col)).collect();
                let y = forward(&l, &b);
                for i in 0..n {
                    x.set(i, col, y[i]);
                }
            }
            let mut c = DenseMatrix::zeros(n);
            for col in 0..n {
                let y = forward(&l, x.row(col));
                for i in 0..n {
                    c.set(i, col, y[i]);
                }
            }
            for i in 0..n {
                for j in 0..i {
                    let avg = T::lit(0.5) * (c.get(i, j) + c.get(j, i));
                    c.set(i, j, avg);
                    c.set(j, i, avg);
                }
            }
            let eig = SymmetricEigen::new(&c)?;
            let vectors = (0..k).map(|c| backward(&l, eig.vector(c))).collect();
            Ok((eig.values[..k].to_vec(), vectors))
        }
    }
}

fn densify<T: Real>(a: &CsrMatrix<T>) -> DenseMatrix<T> {
    let mut d = DenseMatrix::zeros(a.n());
    for (i, j, v) in a.triplets() {
        d.set(i, j, v);
    }
    d
}

fn forward<T: Real>(l: &DenseMatrix<T>, b: &[T]) -> Vec<T> {
    let n = l.n();
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let row = l.row(i);
        let s = b[i] - dot(&row[..i], &y[..i]);
        y[i] = s / row[i];
    }
    y
}

fn backward<T: Real>(l: &DenseMatrix<T>, b: &[T]) -> Vec<T> {
    let n = l.n();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        x[i] /= l.get(i, i);
        let xi = x[i];
        for j in 0..i {
            x[j] -= l.get(i, j) * xi;
        }
    }
    x
}

/// M-orthonormal basis grown by block classical Gram-Schmidt with one
/// reorthogonalization pass.
struct MassBasis<'a, T> {
    ops: &'a OperatorPair<T>,
    vecs: Vec<Vec<T>>,
    mass_vecs: Vec<Vec<T>>,
}

impl<'a, T: Real> MassBasis<'a, T> {
    fn new(ops: &'a OperatorPair<T>) -> Self {
        Self {
            ops,
            vecs: Vec::new(),
            mass_vecs: Vec::new(),
        }
    }

    /// Orthonormalizes `w` against the basis and appends it unless it is
    /// numerically dependent. Returns whether it was kept.
    fn push(&mut self, mut w: Vec<T>) -> bool {
        let start = self.ops.mass_inner(&w, &w).sqrt();
        if !(start > T::zero()) {
            return false;
        }
        for _ in 0..2 {
            let mw = self.ops.apply_mass(&w);
            let coeffs: Vec<T> = self.vecs.par_iter().map(|v| dot(v, &mw)).collect();
            let vecs = &self.vecs;
            w.par_chunks_mut(512).enumerate().for_each(|(c, chunk)| {
                let off = c * 512;
                let len = chunk.len();
                for (v, &a) in vecs.iter().zip(&coeffs) {
                    for (x, &y) in chunk.iter_mut().zip(&v[off..off + len]) {
                        *x -= a * y;
                    }
                }
            });
        }
        let norm = self.ops.mass_inner(&w, &w).sqrt();
        if !(norm > T::lit(1e-12).max(T::lit(100.0) * T::epsilon()) * start) {
            return false;
        }
        let inv = T::one() / norm;
        w.iter_mut().for_each(|x| *x *= inv);
        self.mass_vecs.push(self.ops.apply_mass(&w));
        self.vecs.push(w);
        true
    }
}

/// Restarted block Krylov iteration on `(S + tau M)^{-1} M` with
/// Rayleigh-Ritz extraction in the M inner product.
fn krylov_route<T: Real>(
    ops: &OperatorPair<T>,
    k: usize,
    block: usize,
    options: &SolverOptions,
) -> Result<Spectrum<T>, SpectralError> {
    let n = ops.n();
    let trace_s: T = ops.stiffness.diagonal().into_iter().sum();
    let trace_m: T = ops.lumped_mass().iter().copied().sum();
    let tau = T::lit(1e-2) * trace_s / trace_m;
    let shifted = ops.stiffness.add_scaled(&ops.mass, tau);
    let factor = EnvelopeCholesky::factor(&shifted)?;
    let tol = T::lit(options.tol);

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut current: Vec<Vec<T>> = (0..block)
        .map(|_| (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
        .collect();
    let mut worst = f64::INFINITY;

    for _cycle in 0..options.max_cycles {
        let mut basis = MassBasis::new(ops);
        let mut frontier = Vec::new();
        for x in current.drain(..) {
            if basis.push(x) {
                frontier.push(basis.vecs.len() - 1);
            }
        }
        for _ in 0..options.depth {
            let images: Vec<Vec<T>> = frontier
                .par_iter()
                .map(|&i| factor.solve(&basis.mass_vecs[i]))
                .collect();
            frontier.clear();
            for w in images {
                if basis.push(w) {
                    frontier.push(basis.vecs.len() - 1);
                }
            }
        }

        let m = basis.vecs.len();
        let sv: Vec<Vec<T>> = basis.vecs.par_iter().map(|v| ops.stiffness.mul_vec(v)).collect();
        let mut h = DenseMatrix::zeros(m);
        let rows: Vec<Vec<T>> = (0..m)
            .into_par_iter()
            .map(|i| (0..=i).map(|j| dot(&basis.vecs[i], &sv[j])).collect())
            .collect();
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                h.set(i, j, x);
                h.set(j, i, x);
            }
        }
        let eig = SymmetricEigen::new(&h)?;
        let keep = block.min(m);
        current = (0..keep)
            .into_par_iter()
            .map(|c| {
                let y = eig.vector(c);
                let mut x = vec![T::zero(); n];
                for (v, &a) in basis.vecs.iter().zip(y) {
                    for (xi, &vi) in x.iter_mut().zip(v) {
                        *xi += a * vi;
                    }
                }
                x
            })
            .collect();
        if keep < k {
            return Err(SpectralError::NoConvergence {
                cycles: 0,
                worst: f64::INFINITY,
            });
        }
        let residuals: Vec<T> = (0..k)
            .into_par_iter()
            .map(|c| ops.relative_residual(&current[c], eig.values[c].max(T::zero())))
            .collect();
        let cycle_worst = residuals.iter().copied().fold(T::zero(), T::max);
        worst = cycle_worst.as_f64();

        if cycle_worst <= tol {
            let values = eig.values[..k].to_vec();
            current.truncate(k);
            return Ok((values, current));
        }
    }
    Err(SpectralError::NoConvergence {
        cycles: options.max_cycles,
        worst,
    })
}
