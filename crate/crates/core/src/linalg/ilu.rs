use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Incomplete LU factorization restricted to the pattern of `A`.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let mut lu = a.clone();
        let mut diag = vec![usize::MAX; n];
        for (i, d) in diag.iter_mut().enumerate() {
            *d = lu.find(i, i).ok_or(Error::SingularMatrix { step: i })?;
        }
        let rp = lu.row_ptr().to_vec();
        let ci = lu.col_idx().to_vec();
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            for p in rp[i]..rp[i + 1] {
                pos[ci[p]] = p;
            }
            for p in rp[i]..rp[i + 1] {
                let k = ci[p];
                if k >= i {
                    break;
                }
                let vals = lu.values_mut();
                let pivot = vals[diag[k]];
                if pivot == 0.0 {
                    return Err(Error::SingularMatrix { step: k });
                }
                vals[p] /= pivot;
                let lik = vals[p];
                for q in diag[k] + 1..rp[k + 1] {
                    let j = ci[q];
                    if pos[j] != usize::MAX {
                        vals[pos[j]] -= lik * vals[q];
                    }
                }
            }
            for p in rp[i]..rp[i + 1] {
                pos[ci[p]] = usize::MAX;
            }
            if lu.values()[diag[i]] == 0.0 {
                return Err(Error::SingularMatrix { step: i });
            }
        }
        Ok(Ilu0 { lu, diag })
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.diag.len();
        let (rp, ci, v) = (self.lu.row_ptr(), self.lu.col_idx(), self.lu.values());
        x.copy_from_slice(b);
        for i in 0..n {
            let mut s = x[i];
            for p in rp[i]..self.diag[i] {
                s -= v[p] * x[ci[p]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for p in self.diag[i] + 1..rp[i + 1] {
                s -= v[p] * x[ci[p]];
            }
            x[i] = s / v[self.diag[i]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_tridiagonal() {
        let n = 20;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.2));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let ilu = Ilu0::new(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let mut x = vec![0.0; n];
        ilu.solve_into(&b, &mut x);
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-12);
        }
    }
}
