use super::gmres::{gmres, GmresConfig, Preconditioner};
use super::ilu::Ilu0;
use super::lu::SparseLu;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Approximate inverse used for one diagonal block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerSolverKind {
    /// Sparse LU; exact up to rounding.
    SparseDirect,
    /// ILU(0)-preconditioned GMRES to the given residual reduction.
    IluGmres { reduction: f64, max_iter: usize },
    /// One diagonal scaling. Only meant for tests.
    Jacobi,
}

impl InnerSolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            InnerSolverKind::SparseDirect => "direct",
            InnerSolverKind::IluGmres { .. } => "ilu_gmres",
            InnerSolverKind::Jacobi => "jacobi",
        }
    }
}

#[derive(Debug)]
enum Imp {
    Direct(SparseLu),
    Ilu { a: CsrMatrix, ilu: Ilu0, cfg: GmresConfig },
    Jacobi(Vec<f64>),
}

#[derive(Debug)]
pub struct InnerSolver {
    n: usize,
    imp: Imp,
}

impl InnerSolver {
    pub fn new(kind: InnerSolverKind, a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let imp = match kind {
            InnerSolverKind::SparseDirect => Imp::Direct(SparseLu::new(a)?),
            InnerSolverKind::IluGmres { reduction, max_iter } => Imp::Ilu {
                a: a.clone(),
                ilu: Ilu0::new(a)?,
                cfg: GmresConfig {
                    reduction,
                    max_iter,
                    restart: max_iter.min(100),
                },
            },
            InnerSolverKind::Jacobi => {
                let d = a.diagonal();
                if let Some(i) = d.iter().position(|&x| x == 0.0) {
                    return Err(Error::SingularMatrix { step: i });
                }
                Imp::Jacobi(d.iter().map(|x| 1.0 / x).collect())
            }
        };
        Ok(InnerSolver { n, imp })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        if self.n == 0 {
            return Ok(());
        }
        match &self.imp {
            Imp::Direct(lu) => lu.solve_into(b, x),
            Imp::Ilu { a, ilu, cfg } => {
                let out = gmres(a, ilu, b, *cfg)?;
                x.copy_from_slice(&out.x);
            }
            Imp::Jacobi(inv) => {
                for ((xi, bi), di) in x.iter_mut().zip(b).zip(inv) {
                    *xi = bi * di;
                }
            }
        }
        Ok(())
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.n];
        self.solve(b, &mut x)?;
        Ok(x)
    }
}

impl Preconditioner for Ilu0 {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.solve_into(r, z);
        Ok(())
    }
}

impl Preconditioner for InnerSolver {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.solve(r, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn all_variants_reduce_residual() {
        let a = laplace_1d(30);
        let b = vec![1.0; 30];
        for kind in [
            InnerSolverKind::SparseDirect,
            InnerSolverKind::IluGmres {
                reduction: 1e8,
                max_iter: 200,
            },
        ] {
            let s = InnerSolver::new(kind, &a).unwrap();
            let x = s.solve_vec(&b).unwrap();
            let r: f64 = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(r < 1e-7, "{kind:?}: {r}");
        }
        let j = InnerSolver::new(InnerSolverKind::Jacobi, &a).unwrap();
        assert_eq!(j.solve_vec(&b).unwrap()[0], 0.5);
    }
}
