use super::newton::LinearizedSystem;
use crate::error::Result;
use crate::linalg::{
    extract_blocks, gmres, BlockLayout, BlockLdu, BlockSolverConfig, CsrMatrix, FluidStrategy, GmresConfig,
    IdentityPreconditioner, InnerSolverKind, SolidStrategy, SolveTimings, SparseLu,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearMethod {
    /// Sparse LU of the whole Jacobian.
    Direct,
    /// Unpreconditioned GMRES.
    Gmres,
    /// GMRES right-preconditioned by the block-LDU approximation.
    GmresBlockLdu,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolverConfig {
    pub method: LinearMethod,
    pub gmres: GmresConfig,
    /// Block sub-solvers; the `dt_theta` of a solid Schur strategy is
    /// replaced by the current `Δtθ`.
    pub blocks: BlockSolverConfig,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        LinearSolverConfig {
            method: LinearMethod::GmresBlockLdu,
            gmres: GmresConfig::default(),
            blocks: BlockSolverConfig {
                mesh: InnerSolverKind::SparseDirect,
                solid: SolidStrategy::Schur {
                    dt_theta: 0.0,
                    kind: InnerSolverKind::SparseDirect,
                },
                fluid: FluidStrategy::Direct(InnerSolverKind::SparseDirect),
            },
        }
    }
}

impl LinearSolverConfig {
    pub fn blocks_for(&self, dt_theta: f64) -> BlockSolverConfig {
        let mut b = self.blocks;
        if let SolidStrategy::Schur { kind, .. } = b.solid {
            b.solid = SolidStrategy::Schur { dt_theta, kind };
        }
        b
    }
}

/// A factorized or preconditioned FSI Jacobian.
pub enum LinearizedFsi {
    Direct(SparseLu),
    Gmres { a: CsrMatrix, cfg: GmresConfig },
    Block { ldu: BlockLdu, layout: BlockLayout, cfg: GmresConfig },
}

impl LinearizedFsi {
    pub fn new(a: CsrMatrix, layout: &BlockLayout, cfg: &LinearSolverConfig, dt_theta: f64) -> Result<Self> {
        Ok(match cfg.method {
            LinearMethod::Direct => LinearizedFsi::Direct(SparseLu::new(&a)?),
            LinearMethod::Gmres => LinearizedFsi::Gmres { a, cfg: cfg.gmres },
            LinearMethod::GmresBlockLdu => {
                let sys = extract_blocks(&a, layout);
                let ldu = BlockLdu::new(sys, &cfg.blocks_for(dt_theta), layout.fluid_velocity)?;
                LinearizedFsi::Block {
                    ldu,
                    layout: layout.clone(),
                    cfg: cfg.gmres,
                }
            }
        })
    }

    /// Accumulated sub-solve times of the block preconditioner.
    pub fn timings(&self) -> Option<SolveTimings> {
        match self {
            LinearizedFsi::Block { ldu, .. } => Some(ldu.timings()),
            _ => None,
        }
    }
}

impl LinearizedSystem for LinearizedFsi {
    fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, usize)> {
        match self {
            LinearizedFsi::Direct(lu) => Ok((lu.solve(b), 0)),
            LinearizedFsi::Gmres { a, cfg } => {
                let out = gmres(a, &IdentityPreconditioner, b, *cfg)?;
                Ok((out.x, out.iterations))
            }
            LinearizedFsi::Block { ldu, layout, cfg } => {
                let bb = layout.to_block_order(b);
                let out = gmres(ldu.system(), ldu, &bb, *cfg)?;
                Ok((layout.from_block_order(&out.x), out.iterations))
            }
        }
    }
}
