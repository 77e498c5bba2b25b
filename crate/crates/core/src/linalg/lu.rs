//! Left-looking sparse LU with threshold partial pivoting.

use super::ordering::nested_dissection;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Diagonal entries within this factor of the column maximum are preferred as pivots.
pub const PIVOT_THRESHOLD: f64 = 0.1;

/// Column-compressed storage used internally by the factorization.
#[derive(Debug, Clone)]
struct Csc {
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<f64>,
}

impl Csc {
    fn from_csr(a: &CsrMatrix) -> Self {
        let t = a.transpose();
        Csc {
            colptr: t.row_ptr().to_vec(),
            rowidx: t.col_idx().to_vec(),
            values: t.values().to_vec(),
        }
    }
}

/// `P A Q = L U` with unit lower triangular `L`.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<f64>,
    pinv: Vec<usize>,
    q: Vec<usize>,
}

impl SparseLu {
    /// Factorizes with a nested-dissection column ordering.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let q = nested_dissection(a);
        Self::with_ordering(a, q, PIVOT_THRESHOLD)
    }

    pub fn with_ordering(a: &CsrMatrix, q: Vec<usize>, tol: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        let ac = Csc::from_csr(a);
        let mut lp = Vec::with_capacity(n + 1);
        let mut li = Vec::with_capacity(4 * a.nnz());
        let mut lx = Vec::with_capacity(4 * a.nnz());
        let mut up = Vec::with_capacity(n + 1);
        let mut ui = Vec::with_capacity(4 * a.nnz());
        let mut ux = Vec::with_capacity(4 * a.nnz());
        let mut pinv = vec![usize::MAX; n];
        let mut x = vec![0.0; n];
        let mut xi = vec![0usize; 2 * n];
        let mut marked = vec![false; n];

        for k in 0..n {
            lp.push(li.len());
            up.push(ui.len());
            let col = q[k];
            let top = spsolve(&lp, &li, &lx, &ac, col, &mut xi, &mut x, &pinv, &mut marked, n);
            let mut ipiv = usize::MAX;
            let mut amax = -1.0;
            for &i in &xi[top..n] {
                if pinv[i] == usize::MAX {
                    let t = x[i].abs();
                    if t > amax {
                        amax = t;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == usize::MAX || amax <= 0.0 || !amax.is_finite() {
                return Err(Error::SingularMatrix { step: k });
            }
            if pinv[col] == usize::MAX && x[col].abs() >= amax * tol {
                ipiv = col;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(1.0);
            for &i in &xi[top..n] {
                if pinv[i] == usize::MAX {
                    li.push(i);
                    lx.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        lp.push(li.len());
        up.push(ui.len());
        for r in &mut li {
            *r = pinv[*r];
        }
        Ok(SparseLu {
            n,
            lp,
            li,
            lx,
            up,
            ui,
            ux,
            pinv,
            q,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries in `L` and `U`.
    pub fn fill(&self) -> usize {
        self.lx.len() + self.ux.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], out: &mut [f64]) {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[self.pinv[i]] = b[i];
        }
        for j in 0..n {
            let yj = y[j];
            if yj != 0.0 {
                for p in self.lp[j] + 1..self.lp[j + 1] {
                    y[self.li[p]] -= self.lx[p] * yj;
                }
            }
        }
        for j in (0..n).rev() {
            let last = self.up[j + 1] - 1;
            y[j] /= self.ux[last];
            let yj = y[j];
            if yj != 0.0 {
                for p in self.up[j]..last {
                    y[self.ui[p]] -= self.ux[p] * yj;
                }
            }
        }
        for k in 0..n {
            out[self.q[k]] = y[k];
        }
    }
}

/// Solves `L x = A(:, col)` for the partially built `L`; returns the start of
/// the nonzero pattern in `xi[top..n]`.
#[allow(clippy::too_many_arguments)]
fn spsolve(
    lp: &[usize],
    li: &[usize],
    lx: &[f64],
    a: &Csc,
    col: usize,
    xi: &mut [usize],
    x: &mut [f64],
    pinv: &[usize],
    marked: &mut [bool],
    n: usize,
) -> usize {
    let mut top = n;
    for p in a.colptr[col]..a.colptr[col + 1] {
        let i = a.rowidx[p];
        if !marked[i] {
            top = dfs(i, lp, li, top, xi, pinv, marked, n);
        }
    }
    for &i in &xi[top..n] {
        marked[i] = false;
    }
    for &i in &xi[top..n] {
        x[i] = 0.0;
    }
    for p in a.colptr[col]..a.colptr[col + 1] {
        x[a.rowidx[p]] = a.values[p];
    }
    for px in top..n {
        let j = xi[px];
        let jj = pinv[j];
        if jj == usize::MAX {
            continue;
        }
        let xj = x[j];
        let end = lp.get(jj + 1).copied().unwrap_or(li.len());
        for p in lp[jj] + 1..end {
            x[li[p]] -= lx[p] * xj;
        }
    }
    top
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    start: usize,
    lp: &[usize],
    li: &[usize],
    mut top: usize,
    xi: &mut [usize],
    pinv: &[usize],
    marked: &mut [bool],
    n: usize,
) -> usize {
    // The node stack grows up from xi[0] and the output grows down from xi[n];
    // xi[n..2n] holds the per-level scan positions.
    let (s, pstack) = xi.split_at_mut(n);
    let col_end = |c: usize| lp.get(c + 1).copied().unwrap_or(li.len());
    let mut head: isize = 0;
    s[0] = start;
    while head >= 0 {
        let h = head as usize;
        let j = s[h];
        let jnew = pinv[j];
        if !marked[j] {
            marked[j] = true;
            pstack[h] = if jnew == usize::MAX { 0 } else { lp[jnew] };
        }
        let mut done = true;
        let p2 = if jnew == usize::MAX { 0 } else { col_end(jnew) };
        let mut p = pstack[h];
        while p < p2 {
            let i = li[p];
            if !marked[i] {
                pstack[h] = p;
                head += 1;
                s[head as usize] = i;
                done = false;
                break;
            }
            p += 1;
        }
        if done {
            head -= 1;
            top -= 1;
            s[top] = j;
        }
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(n: usize, density: f64, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 0.1 + rng.random::<f64>()));
            for j in 0..n {
                if i != j && rng.random::<f64>() < density {
                    t.push((i, j, rng.random::<f64>() * 2.0 - 1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn solves_random_systems() {
        for seed in 0..10 {
            let a = random_sparse(120, 0.03, seed);
            let b: Vec<f64> = (0..120).map(|i| (i as f64).sin()).collect();
            let lu = SparseLu::new(&a).unwrap();
            let x = lu.solve(&b);
            let r = a.mul_vec(&x);
            let err: f64 = r.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "seed {seed}: {err}");
        }
    }

    #[test]
    fn pivots_on_zero_diagonal() {
        let a = CsrMatrix::from_dense(&DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 2.0]));
        let x = SparseLu::new(&a).unwrap().solve(&[1.0, 2.0, 3.0]);
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ri - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_detected() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]);
        assert!(matches!(SparseLu::new(&a), Err(Error::SingularMatrix { .. })));
    }
}
