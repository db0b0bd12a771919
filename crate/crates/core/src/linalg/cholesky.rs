use std::collections::VecDeque;

use super::{CsrMatrix, LinalgError};
use crate::Real;

/// Reverse Cuthill-McKee ordering. Returns `order` with `order[new] = old`.
///
/// Each connected component is started from a pseudo-peripheral vertex found
/// by repeated breadth-first sweeps; ties are broken by vertex index so the
/// ordering is deterministic.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    let mut touched = Vec::new();

    // Farthest vertex (lowest degree among the deepest level) from `start`.
    let mut farthest = |start: usize| -> (usize, usize) {
        for &v in &touched {
            level[v] = usize::MAX;
        }
        touched.clear();
        let mut queue = VecDeque::from([start]);
        level[start] = 0;
        touched.push(start);
        let mut far = (start, 0usize);
        while let Some(v) = queue.pop_front() {
            let lv = level[v];
            if lv > far.1 || (lv == far.1 && degree[v] < degree[far.0]) {
                far = (v, lv);
            }
            for &w in &adj[v] {
                if level[w] == usize::MAX {
                    level[w] = lv + 1;
                    touched.push(w);
                    queue.push_back(w);
                }
            }
        }
        far
    };

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let mut start = seed;
        let mut ecc = 0usize;
        for _ in 0..8 {
            let (far, e) = farthest(start);
            if e <= ecc {
                break;
            }
            ecc = e;
            start = far;
        }

        let begin = order.len();
        visited[start] = true;
        order.push(start);
        let mut head = begin;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            next.dedup();
            for w in next {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (profile) Cholesky factorization `P A P^T = L L^T` of a sparse
/// symmetric positive definite matrix, using a reverse Cuthill-McKee
/// permutation to keep the envelope narrow.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky<T> {
    n: usize,
    /// `order[new] = old`.
    order: Vec<usize>,
    /// First stored column of each (permuted) row.
    first: Vec<usize>,
    /// Offset of row `i`'s first stored entry in `vals`.
    start: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> EnvelopeCholesky<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self, LinalgError> {
        let n = a.n();
        let order = reverse_cuthill_mckee(&a.adjacency());
        let mut position = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = position[old];
            for &c in a.row(old).0 {
                let j = position[c];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut vals = vec![T::zero(); start[n]];
        for old in 0..n {
            let i = position[old];
            let (cols, v) = a.row(old);
            for (&c, &x) in cols.iter().zip(v) {
                let j = position[c];
                if j <= i {
                    vals[start[i] + (j - first[i])] += x;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = start[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = vals[row_i + (j - fi)];
                let ri = &vals[row_i + (k0 - fi)..row_i + (j - fi)];
                let rj = &vals[start[j] + (k0 - fj)..start[j] + (j - fj)];
                for (x, y) in ri.iter().zip(rj) {
                    s -= *x * *y;
                }
                let djj = vals[start[j] + (j - fj)];
                vals[row_i + (j - fi)] = s / djj;
            }
            let mut d = vals[row_i + (i - fi)];
            for x in &vals[row_i..row_i + (i - fi)] {
                d -= *x * *x;
            }
            if !(d > T::zero()) {
                return Err(LinalgError::NotPositiveDefinite {
                    row: order[i],
                    pivot: d.to_f64().unwrap_or(f64::NAN),
                });
            }
            vals[row_i + (i - fi)] = d.sqrt();
        }

        Ok(Self {
            n,
            order,
            first,
            start: start[..n].to_vec(),
            vals,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.vals.len()
    }

    /// Solves `A x = b`; `work` must have length `n`.
    pub fn solve_into(&self, b: &[T], x: &mut [T], work: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for (new, &old) in self.order.iter().enumerate() {
            work[new] = b[old];
        }
        // L y = Pb
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i] + (i - fi) + 1];
            let mut s = work[i];
            for (l, y) in row[..i - fi].iter().zip(&work[fi..i]) {
                s -= *l * *y;
            }
            work[i] = s / row[i - fi];
        }
        // L^T z = y, column-oriented sweep over the row-stored factor.
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i] + (i - fi) + 1];
            let zi = work[i] / row[i - fi];
            work[i] = zi;
            for (l, w) in row[..i - fi].iter().zip(work[fi..i].iter_mut()) {
                *w -= *l * zi;
            }
        }
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = work[new];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        let mut work = vec![T::zero(); self.n];
        self.solve_into(b, &mut x, &mut work);
        x
    }
}
