use crate::Real;

/// Compressed sparse row matrix. Column indices are sorted within each row
/// and duplicates are summed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds an `n x n` matrix, summing repeated `(row, col)` entries.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut entries: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &d)| (i, i, d)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = T::zero();
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::zero();
        for (i, xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            let mut row = T::zero();
            for (&j, &v) in cols.iter().zip(vals) {
                row += v * y[j];
            }
            acc += *xi * row;
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n).map(|i| self.row(i).1.iter().copied().sum()).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.row(i).0.iter().all(|&j| j == i))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.triplets()
            .all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol * (T::one() + v.abs()))
    }

    /// `self + alpha * other`, over the union of both sparsity patterns.
    pub fn add_scaled(&self, other: &Self, alpha: T) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_triplets(
            self.n,
            self.triplets()
                .chain(other.triplets().map(|(i, j, v)| (i, j, alpha * v))),
        )
    }

    /// `P A P^T` where `perm[i]` is the new index of row/column `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_triplets(
            self.n,
            self.triplets().map(|(i, j, v)| (perm[i], perm[j], v)),
        )
    }

    /// Off-diagonal adjacency lists, used for bandwidth-reducing orderings.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| self.row(i).0.iter().copied().filter(|&j| j != i).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_rows_sorted() {
        let a = CsrMatrix::from_triplets(
            3,
            vec![(0, 2, 1.0), (0, 0, 2.0), (0, 2, 0.5), (2, 1, -1.0)],
        );
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 2), 1.5);
        assert_eq!(a.row(0).0, &[0, 2]);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.5, 0.0, -1.0]);
    }

    #[test]
    fn permutation_preserves_quadratic_form() {
        let a = CsrMatrix::from_triplets(
            3,
            vec![(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (2, 2, 5.0)],
        );
        let perm = [2, 0, 1];
        let p = a.permuted(&perm);
        let x: [f64; 3] = [0.3, -1.2, 0.7];
        let mut px = [0.0; 3];
        for i in 0..3 {
            px[perm[i]] = x[i];
        }
        assert!((a.bilinear(&x, &x) - p.bilinear(&px, &px)).abs() < 1e-14);
    }
}
