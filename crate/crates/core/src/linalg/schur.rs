use std::sync::Mutex;

use super::gmres::{gmres, GmresConfig, LinearOperator, Preconditioner};
use super::inner::{InnerSolver, InnerSolverKind};
use super::lu::SparseLu;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Solid block `[[M, −ΔtθM], [ΔtθK, ρ_s M]]` in `[u; v]` ordering.
pub fn solid_block(mass: &CsrMatrix, k_vu: &CsrMatrix, rho_s: f64, dt: f64, theta: f64) -> CsrMatrix {
    let n = mass.nrows();
    let mut t = Vec::new();
    let dtt = dt * theta;
    for i in 0..n {
        let (c, v) = mass.row(i);
        for (&j, &m) in c.iter().zip(v) {
            t.push((i, j, m));
            t.push((i, n + j, -dtt * m));
            t.push((n + i, n + j, rho_s * m));
        }
        let (c, v) = k_vu.row(i);
        for (&j, &k) in c.iter().zip(v) {
            t.push((n + i, j, dtt * k));
        }
    }
    CsrMatrix::from_triplets(2 * n, 2 * n, &t)
}

/// Velocity elimination for the solid block with equal displacement and velocity masses:
///
/// `x_v = (ρ_s M + Δt²θ²K)⁻¹ (r_v − ΔtθK M⁻¹ r_u)`, then `x_u = M⁻¹ (r_u + ΔtθM x_v)`.
pub fn solid_schur_solve(
    mass: &CsrMatrix,
    k_vu: &CsrMatrix,
    rho_s: f64,
    dt: f64,
    theta: f64,
    kind: InnerSolverKind,
    r: &[f64],
) -> Result<Vec<f64>> {
    let n = mass.nrows();
    let dtt = dt * theta;
    let (r_u, r_v) = r.split_at(n);
    let mut reduced = mass.clone();
    reduced.scale(rho_s);
    let reduced = reduced.add(dtt * dtt, k_vu);
    let m_inv = InnerSolver::new(kind, mass)?;
    let s_inv = InnerSolver::new(kind, &reduced)?;

    let y = m_inv.solve_vec(r_u)?;
    let ky = k_vu.mul_vec(&y);
    let rhs: Vec<f64> = r_v.iter().zip(&ky).map(|(a, b)| a - dtt * b).collect();
    let x_v = s_inv.solve_vec(&rhs)?;
    let mx = mass.mul_vec(&x_v);
    let rhs: Vec<f64> = r_u.iter().zip(&mx).map(|(a, b)| a + dtt * b).collect();
    let x_u = m_inv.solve_vec(&rhs)?;
    Ok([x_u, x_v].concat())
}

/// The same elimination applied to an assembled solid block `[[S_uu, S_uv], [S_vu, S_vv]]`.
///
/// Uses `S_uv = −Δtθ S_uu`, which holds row by row for the displacement
/// equations, so the reduced matrix is `S_vv + Δtθ S_vu`.
#[derive(Debug)]
pub struct SolidSchur {
    n: usize,
    uu: InnerSolver,
    reduced: InnerSolver,
    uv: CsrMatrix,
    vu: CsrMatrix,
}

impl SolidSchur {
    pub fn new(s: &CsrMatrix, dt_theta: f64, kind: InnerSolverKind) -> Result<Self> {
        let n = s.nrows() / 2;
        let first: Vec<usize> = (0..n).collect();
        let second: Vec<usize> = (n..2 * n).collect();
        let map = |lo: usize| -> Vec<usize> {
            (0..2 * n)
                .map(|j| if j >= lo && j < lo + n { j - lo } else { usize::MAX })
                .collect()
        };
        let (mu, mv) = (map(0), map(n));
        let uu = s.select(&first, &mu, n);
        let uv = s.select(&first, &mv, n);
        let vu = s.select(&second, &mu, n);
        let vv = s.select(&second, &mv, n);
        let reduced = vv.add(dt_theta, &vu);
        Ok(SolidSchur {
            n,
            uu: InnerSolver::new(kind, &uu)?,
            reduced: InnerSolver::new(kind, &reduced)?,
            uv,
            vu,
        })
    }

    pub fn solve(&self, r: &[f64], x: &mut [f64]) -> Result<()> {
        let n = self.n;
        let (r_u, r_v) = r.split_at(n);
        let y = self.uu.solve_vec(r_u)?;
        let mut rhs = r_v.to_vec();
        self.vu.sub_matvec(&y, &mut rhs);
        let (x_u, x_v) = x.split_at_mut(n);
        self.reduced.solve(&rhs, x_v)?;
        let mut rhs = r_u.to_vec();
        self.uv.sub_matvec(x_v, &mut rhs);
        self.uu.solve(&rhs, x_u)
    }
}

/// Pressure Schur complement `D − C A⁻¹ B` as an operator.
struct PressureSchur<'a> {
    a: &'a InnerSolver,
    b: &'a CsrMatrix,
    c: &'a CsrMatrix,
    d: &'a CsrMatrix,
    failure: Mutex<Option<Error>>,
}

impl LinearOperator for PressureSchur<'_> {
    fn dim(&self) -> usize {
        self.d.nrows()
    }

    fn apply(&self, p: &[f64], y: &mut [f64]) {
        let bp = self.b.mul_vec(p);
        let mut t = vec![0.0; bp.len()];
        if let Err(e) = self.a.solve(&bp, &mut t) {
            self.failure.lock().unwrap().get_or_insert(e);
        }
        self.d.matvec(p, y);
        self.c.sub_matvec(&t, y);
    }
}

struct LuPreconditioner<'a>(&'a SparseLu);

impl Preconditioner for LuPreconditioner<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.0.solve_into(r, z);
        Ok(())
    }
}

/// Uzawa-type fluid solve on `[[A, B], [C, D]]` (velocity, pressure).
///
/// The pressure Schur complement is solved by GMRES preconditioned with the
/// sparse approximation `D − C diag(A)⁻¹ B`.
#[derive(Debug)]
pub struct FluidUzawa {
    nv: usize,
    a: InnerSolver,
    b: CsrMatrix,
    c: CsrMatrix,
    d: CsrMatrix,
    schur_approx: Option<SparseLu>,
    inner: GmresConfig,
}

impl FluidUzawa {
    pub fn new(f: &CsrMatrix, nv: usize, velocity: InnerSolverKind, inner: GmresConfig) -> Result<Self> {
        let n = f.nrows();
        let np = n - nv;
        let vel: Vec<usize> = (0..nv).collect();
        let pre: Vec<usize> = (nv..n).collect();
        let map_v: Vec<usize> = (0..n).map(|j| if j < nv { j } else { usize::MAX }).collect();
        let map_p: Vec<usize> = (0..n).map(|j| if j >= nv { j - nv } else { usize::MAX }).collect();
        let a = f.select(&vel, &map_v, nv);
        let b = f.select(&vel, &map_p, np);
        let c = f.select(&pre, &map_v, nv);
        let d = f.select(&pre, &map_p, np);
        let schur_approx = if np > 0 {
            let dinv: Vec<f64> = a.diagonal().iter().map(|x| if *x != 0.0 { 1.0 / x } else { 0.0 }).collect();
            let mut scaled_b = b.clone();
            for i in 0..nv {
                let s = dinv[i];
                scaled_b.row_mut(i).1.iter_mut().for_each(|v| *v *= s);
            }
            let approx = d.add(-1.0, &c.matmul(&scaled_b));
            Some(SparseLu::new(&approx)?)
        } else {
            None
        };
        Ok(FluidUzawa {
            nv,
            a: InnerSolver::new(velocity, &a)?,
            b,
            c,
            d,
            schur_approx,
            inner,
        })
    }

    pub fn solve(&self, r: &[f64], x: &mut [f64]) -> Result<()> {
        let nv = self.nv;
        let (r_v, r_p) = r.split_at(nv);
        let y = self.a.solve_vec(r_v)?;
        let (x_v, x_p) = x.split_at_mut(nv);
        if let Some(approx) = &self.schur_approx {
            let mut rhs = r_p.to_vec();
            self.c.sub_matvec(&y, &mut rhs);
            let op = PressureSchur {
                a: &self.a,
                b: &self.b,
                c: &self.c,
                d: &self.d,
                failure: Mutex::new(None),
            };
            let out = gmres(&op, &LuPreconditioner(approx), &rhs, self.inner)?;
            if let Some(e) = op.failure.into_inner().unwrap() {
                return Err(e);
            }
            x_p.copy_from_slice(&out.x);
            let mut rv = r_v.to_vec();
            self.b.sub_matvec(x_p, &mut rv);
            self.a.solve(&rv, x_v)
        } else {
            x_v.copy_from_slice(&y);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn decoupled_solid_limit() {
        let m = CsrMatrix::identity(3);
        let k = CsrMatrix::zeros(3, 3);
        let r = [1.0, 2.0, 3.0, 10.0, 20.0, 30.0];
        let (rho, dt, th) = (1e4, 0.01, 0.5);
        let x = solid_schur_solve(&m, &k, rho, dt, th, InnerSolverKind::SparseDirect, &r).unwrap();
        for i in 0..3 {
            assert!((x[3 + i] - r[3 + i] / rho).abs() < 1e-15);
            assert!((x[i] - (r[i] + dt * th * x[3 + i])).abs() < 1e-15);
        }
    }

    #[test]
    fn four_dof_matches_dense() {
        let m = CsrMatrix::identity(2);
        let k = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]);
        let (rho, dt, th) = (3.0, 0.1, 0.55);
        let r = [0.3, -1.0, 2.0, 0.7];
        let x = solid_schur_solve(&m, &k, rho, dt, th, InnerSolverKind::SparseDirect, &r).unwrap();
        let full = solid_block(&m, &k, rho, dt, th).to_dense();
        let exact = full.lu().solve(&DVector::from_row_slice(&r)).unwrap();
        for i in 0..4 {
            assert!((x[i] - exact[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn small_dt_limit() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 1.0)]);
        let k = CsrMatrix::from_triplets(2, 2, &[(0, 0, 5.0), (1, 1, 7.0)]);
        let r = [1.0, 1.0, 1.0, 1.0];
        let x = solid_schur_solve(&m, &k, 2.0, 1e-9, 0.5, InnerSolverKind::SparseDirect, &r).unwrap();
        let minv = m.to_dense().try_inverse().unwrap();
        let xu = &minv * DVector::from_row_slice(&r[..2]);
        let xv = &minv * DVector::from_row_slice(&r[2..]) / 2.0;
        for i in 0..2 {
            assert!((x[i] - xu[i]).abs() < 1e-8);
            assert!((x[2 + i] - xv[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn assembled_form_matches_parts() {
        let m = CsrMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, 2.0), (2, 2, 1.0), (0, 1, 0.3), (1, 0, 0.3)]);
        let k = CsrMatrix::from_triplets(3, 3, &[(0, 0, 4.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 3.0)]);
        let (rho, dt, th) = (5.0, 0.02, 0.52);
        let s = solid_block(&m, &k, rho, dt, th);
        let schur = SolidSchur::new(&s, dt * th, InnerSolverKind::SparseDirect).unwrap();
        let r = [1.0, -2.0, 0.5, 3.0, 0.1, -0.4];
        let mut x = [0.0; 6];
        schur.solve(&r, &mut x).unwrap();
        let y = solid_schur_solve(&m, &k, rho, dt, th, InnerSolverKind::SparseDirect, &r).unwrap();
        for i in 0..6 {
            assert!((x[i] - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn uzawa_without_pressure_coupling() {
        let f = CsrMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, 4.0), (2, 2, 1.0)]);
        let u = FluidUzawa::new(&f, 2, InnerSolverKind::SparseDirect, GmresConfig::default()).unwrap();
        let mut x = [0.0; 3];
        u.solve(&[2.0, 2.0, 0.0], &mut x).unwrap();
        assert_eq!(x, [1.0, 0.5, 0.0]);
    }

    #[test]
    fn uzawa_saddle_point_matches_dense() {
        // Velocity 4 dofs, pressure 2 dofs, zero pressure-pressure block.
        let a = DMatrix::from_row_slice(
            6,
            6,
            &[
                4.0, 1.0, 0.0, 0.0, 1.0, 0.0, //
                1.0, 5.0, 1.0, 0.0, -1.0, 1.0, //
                0.0, 1.0, 4.0, 0.5, 0.0, -1.0, //
                0.0, 0.0, 0.5, 3.0, 1.0, 1.0, //
                1.0, -1.0, 0.0, 1.0, 0.0, 0.0, //
                0.0, 1.0, -1.0, 1.0, 0.0, 0.0,
            ],
        );
        let f = CsrMatrix::from_dense(&a);
        let cfg = GmresConfig {
            reduction: 1e12,
            max_iter: 50,
            restart: 50,
        };
        let u = FluidUzawa::new(&f, 4, InnerSolverKind::SparseDirect, cfg).unwrap();
        let r = [1.0, 0.0, -1.0, 2.0, 0.5, -0.5];
        let mut x = [0.0; 6];
        u.solve(&r, &mut x).unwrap();
        let exact = a.lu().solve(&DVector::from_row_slice(&r)).unwrap();
        let err = (DVector::from_row_slice(&x) - &exact).norm() / exact.norm();
        assert!(err < 1e-10, "{err}");
    }
}
