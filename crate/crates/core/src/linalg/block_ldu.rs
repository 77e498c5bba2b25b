use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::blocks::{BlockSystem, FLUID, MESH, SOLID};
use super::gmres::{GmresConfig, Preconditioner};
use super::inner::{InnerSolver, InnerSolverKind};
use super::schur::{FluidUzawa, SolidSchur};
use crate::error::{BlockId, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolidStrategy {
    /// Solve the whole solid block with one inner solver.
    Direct(InnerSolverKind),
    /// Eliminate the solid velocity through the reduced matrix.
    Schur { dt_theta: f64, kind: InnerSolverKind },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluidStrategy {
    Direct(InnerSolverKind),
    Uzawa { velocity: InnerSolverKind, inner: GmresConfig },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSolverConfig {
    pub mesh: InnerSolverKind,
    pub solid: SolidStrategy,
    pub fluid: FluidStrategy,
}

impl BlockSolverConfig {
    /// Sparse direct solves for every block.
    pub fn exact() -> Self {
        BlockSolverConfig {
            mesh: InnerSolverKind::SparseDirect,
            solid: SolidStrategy::Direct(InnerSolverKind::SparseDirect),
            fluid: FluidStrategy::Direct(InnerSolverKind::SparseDirect),
        }
    }
}

/// Accumulated wall time per sub-solve.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveTimings {
    pub mesh: Duration,
    pub solid: Duration,
    pub fluid: Duration,
    pub applications: usize,
}

impl SolveTimings {
    pub fn total(&self) -> Duration {
        self.mesh + self.solid + self.fluid
    }
}

#[derive(Debug)]
enum SolidSolver {
    Direct(InnerSolver),
    Schur(SolidSchur),
}

#[derive(Debug)]
enum FluidSolver {
    Direct(InnerSolver),
    Uzawa(FluidUzawa),
}

/// Approximate block-LDU preconditioner.
///
/// Drops `C_sm` and the Schur perturbation of the fluid block, so one
/// application costs one mesh, two solid, one fluid and one more mesh solve.
#[derive(Debug)]
pub struct BlockLdu {
    sys: BlockSystem,
    mesh: InnerSolver,
    solid: SolidSolver,
    fluid: FluidSolver,
    timings: Mutex<SolveTimings>,
}

fn wrap(block: BlockId) -> impl Fn(Error) -> Error {
    move |e| Error::InnerSolver {
        block,
        source: Box::new(e),
    }
}

impl BlockLdu {
    pub fn new(sys: BlockSystem, cfg: &BlockSolverConfig, fluid_velocity: usize) -> Result<Self> {
        let mesh = InnerSolver::new(cfg.mesh, sys.m()).map_err(wrap(BlockId::Mesh))?;
        let solid = match cfg.solid {
            SolidStrategy::Direct(k) => SolidSolver::Direct(InnerSolver::new(k, sys.s()).map_err(wrap(BlockId::Solid))?),
            SolidStrategy::Schur { dt_theta, kind } => {
                SolidSolver::Schur(SolidSchur::new(sys.s(), dt_theta, kind).map_err(wrap(BlockId::Solid))?)
            }
        };
        let fluid = match cfg.fluid {
            FluidStrategy::Direct(k) => FluidSolver::Direct(InnerSolver::new(k, sys.f()).map_err(wrap(BlockId::Fluid))?),
            FluidStrategy::Uzawa { velocity, inner } => FluidSolver::Uzawa(
                FluidUzawa::new(sys.f(), fluid_velocity, velocity, inner).map_err(wrap(BlockId::Fluid))?,
            ),
        };
        Ok(BlockLdu {
            sys,
            mesh,
            solid,
            fluid,
            timings: Mutex::new(SolveTimings::default()),
        })
    }

    pub fn system(&self) -> &BlockSystem {
        &self.sys
    }

    pub fn timings(&self) -> SolveTimings {
        *self.timings.lock().unwrap()
    }

    pub fn reset_timings(&self) {
        *self.timings.lock().unwrap() = SolveTimings::default();
    }

    fn solve_mesh(&self, b: &[f64], x: &mut [f64], t: &mut SolveTimings) -> Result<()> {
        let start = Instant::now();
        let r = self.mesh.solve(b, x).map_err(wrap(BlockId::Mesh));
        t.mesh += start.elapsed();
        r
    }

    fn solve_solid(&self, b: &[f64], x: &mut [f64], t: &mut SolveTimings) -> Result<()> {
        let start = Instant::now();
        let r = match &self.solid {
            SolidSolver::Direct(s) => s.solve(b, x),
            SolidSolver::Schur(s) => s.solve(b, x),
        }
        .map_err(wrap(BlockId::Solid));
        t.solid += start.elapsed();
        r
    }

    fn solve_fluid(&self, b: &[f64], x: &mut [f64], t: &mut SolveTimings) -> Result<()> {
        let start = Instant::now();
        let r = match &self.fluid {
            FluidSolver::Direct(s) => s.solve(b, x),
            FluidSolver::Uzawa(s) => s.solve(b, x),
        }
        .map_err(wrap(BlockId::Fluid));
        t.fluid += start.elapsed();
        r
    }

    /// Applies the preconditioner to `r = [r_m, r_s, r_f]` in block order.
    pub fn apply_block_ldu(&self, r: &[f64], x: &mut [f64]) -> Result<()> {
        let off = self.sys.offsets();
        let mut t = SolveTimings::default();
        let (r_m, rest) = r.split_at(off[1]);
        let (r_s, r_f) = rest.split_at(off[2] - off[1]);
        let (x_m, rest) = x.split_at_mut(off[1]);
        let (x_s, x_f) = rest.split_at_mut(off[2] - off[1]);

        self.solve_mesh(r_m, x_m, &mut t)?;
        self.solve_solid(r_s, x_s, &mut t)?;
        let mut rhs = r_f.to_vec();
        self.sys.blocks[FLUID][MESH].sub_matvec(x_m, &mut rhs);
        self.sys.blocks[FLUID][SOLID].sub_matvec(x_s, &mut rhs);
        self.solve_fluid(&rhs, x_f, &mut t)?;
        let c_sf = self.sys.c_sf().mul_vec(x_f);
        let mut ds = vec![0.0; x_s.len()];
        self.solve_solid(&c_sf, &mut ds, &mut t)?;
        x_s.iter_mut().zip(&ds).for_each(|(a, b)| *a -= b);
        let mut c = self.sys.blocks[MESH][SOLID].mul_vec(x_s);
        if self.sys.c_mf().nnz() > 0 {
            let cf = self.sys.c_mf().mul_vec(x_f);
            c.iter_mut().zip(&cf).for_each(|(a, b)| *a += b);
        }
        let mut dm = vec![0.0; x_m.len()];
        self.solve_mesh(&c, &mut dm, &mut t)?;
        x_m.iter_mut().zip(&dm).for_each(|(a, b)| *a -= b);

        let mut acc = self.timings.lock().unwrap();
        acc.mesh += t.mesh;
        acc.solid += t.solid;
        acc.fluid += t.fluid;
        acc.applications += 1;
        Ok(())
    }
}

impl Preconditioner for BlockLdu {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        self.apply_block_ldu(r, z)
    }
}
