use std::cmp::Ordering;

use super::{
    canonical_sign, solve_eigenpairs_with, EigenPair, OperatorPair, Parity, SolverOptions,
    SpectralError,
};
use crate::linalg::{DenseMatrix, SymmetricEigen};
use crate::mesh::Involution;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityOptions {
    /// Consecutive eigenvalues closer than `cluster_tol * (1 + lambda)` are
    /// treated as one eigenspace.
    pub cluster_tol: f64,
    /// A split vector whose squared projection onto both parities is at
    /// least this is rejected as mixed.
    pub mixed_tol: f64,
}

impl Default for ParityOptions {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-6,
            mixed_tol: 1e-6,
        }
    }
}

pub fn split_parity<T: Real>(
    pairs: &[EigenPair<T>],
    inv: &Involution,
    ops: &OperatorPair<T>,
) -> Result<Vec<EigenPair<T>>, SpectralError> {
    split_parity_with(pairs, inv, ops, &ParityOptions::default())
}

/// Replaces each eigenvalue cluster by a basis of even and odd vectors.
///
/// Within a cluster the even weights `<P+ v_i, P+ v_j>_M` form a symmetric
/// matrix whose eigenvectors with weight near 1 are even combinations and
/// those near 0 odd ones. A cluster that is already parity-pure keeps its
/// basis, which makes the split idempotent.
pub fn split_parity_with<T: Real>(
    pairs: &[EigenPair<T>],
    inv: &Involution,
    ops: &OperatorPair<T>,
    options: &ParityOptions,
) -> Result<Vec<EigenPair<T>>, SpectralError> {
    let n = ops.n();
    if inv.len() != n || pairs.iter().any(|p| p.coefficients.len() != n) {
        return Err(SpectralError::SizeMismatch);
    }
    let mut out = Vec::with_capacity(pairs.len());
    for range in clusters(pairs, options.cluster_tol) {
        let cluster = &pairs[range.clone()];
        let (even, odd): (Vec<Vec<T>>, Vec<Vec<T>>) = cluster
            .iter()
            .map(|p| project(&p.coefficients, inv))
            .unzip();
        let c = cluster.len();
        let mut g = DenseMatrix::zeros(c);
        for i in 0..c {
            for j in 0..=i {
                let x = ops.mass_inner(&even[i], &even[j]);
                g.set(i, j, x);
                g.set(j, i, x);
            }
        }
        let pure = (0..c).all(|i| {
            let target = if g.get(i, i) > T::lit(0.5) { T::one() } else { T::zero() };
            (0..c).all(|j| {
                let want = if i == j { target } else { T::zero() };
                (g.get(i, j) - want).abs() <= T::lit(1e-10)
            })
        });
        let mut split: Vec<(Parity, Vec<T>)> = Vec::with_capacity(c);
        if pure {
            for i in 0..c {
                if g.get(i, i) > T::lit(0.5) {
                    split.push((Parity::Even, even[i].clone()));
                } else {
                    split.push((Parity::Odd, odd[i].clone()));
                }
            }
        } else {
            let eig = SymmetricEigen::new(&g)?;
            for a in 0..c {
                let mu = eig.values[a];
                let lo = T::lit(options.mixed_tol);
                if mu >= lo && mu <= T::one() - lo {
                    return Err(SpectralError::MixedParityResidual {
                        index: range.start + a,
                        even_weight: mu.as_f64(),
                    });
                }
                let (parity, parts) = if mu > T::lit(0.5) {
                    (Parity::Even, &even)
                } else {
                    (Parity::Odd, &odd)
                };
                let mut w = vec![T::zero(); n];
                for (part, &y) in parts.iter().zip(eig.vector(a)) {
                    for (wi, &x) in w.iter_mut().zip(part) {
                        *wi += y * x;
                    }
                }
                split.push((parity, w));
            }
        }
        let mut finished: Vec<EigenPair<T>> = split
            .into_iter()
            .map(|(parity, mut v)| {
                let norm = ops.mass_inner(&v, &v).sqrt();
                let inv_norm = T::one() / norm;
                v.iter_mut().for_each(|x| *x *= inv_norm);
                canonical_sign(&mut v);
                let lambda = ops.stiffness.bilinear(&v, &v).max(T::zero());
                let residual = ops.relative_residual(&v, lambda);
                EigenPair {
                    index: 0,
                    eigenvalue: lambda,
                    coefficients: v,
                    parity,
                    residual,
                }
            })
            .collect();
        finished.sort_by(|a, b| {
            parity_rank(a.parity)
                .cmp(&parity_rank(b.parity))
                .then_with(|| lexicographic(&a.coefficients, &b.coefficients))
        });
        out.extend(finished);
    }
    for (i, p) in out.iter_mut().enumerate() {
        p.index = i;
    }
    Ok(out)
}

/// Solves for `k` eigenpairs and splits them by parity, computing enough
/// extra pairs that the cluster straddling index `k - 1` is complete.
pub fn solve_with_parity<T: Real>(
    ops: &OperatorPair<T>,
    inv: &Involution,
    k: usize,
    solver: &SolverOptions,
    parity: &ParityOptions,
) -> Result<Vec<EigenPair<T>>, SpectralError> {
    let n = ops.n();
    if k == 0 || k >= n {
        return Err(SpectralError::BadK { k, n });
    }
    let mut guard = (k / 10).max(8);
    loop {
        let want = (k + guard).min(n - 1);
        let pairs = solve_eigenpairs_with(ops, want, solver)?;
        let groups = clusters(&pairs, parity.cluster_tol);
        let straddle = groups.iter().find(|r| r.contains(&(k - 1))).unwrap().clone();
        if straddle.end < pairs.len() || want == n - 1 {
            let mut split = split_parity_with(&pairs[..straddle.end], inv, ops, parity)?;
            split.truncate(k);
            return Ok(split);
        }
        guard *= 2;
    }
}

fn clusters<T: Real>(pairs: &[EigenPair<T>], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=pairs.len() {
        let split = i == pairs.len() || {
            let a = pairs[i - 1].eigenvalue;
            pairs[i].eigenvalue - a >= T::lit(tol) * (T::one() + a)
        };
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn project<T: Real>(v: &[T], inv: &Involution) -> (Vec<T>, Vec<T>) {
    let half = T::lit(0.5);
    let pulled = inv.pull_back(v);
    let even = v.iter().zip(&pulled).map(|(&a, &b)| half * (a + b)).collect();
    let odd = v.iter().zip(&pulled).map(|(&a, &b)| half * (a - b)).collect();
    (even, odd)
}

fn parity_rank(p: Parity) -> u8 {
    match p {
        Parity::Even => 0,
        Parity::Odd => 1,
        Parity::Untagged => 2,
    }
}

fn lexicographic<T: Real>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}
