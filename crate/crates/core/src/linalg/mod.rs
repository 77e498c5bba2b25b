//! Sparse linear algebra, Krylov solvers and the block preconditioner.

mod block_ldu;
mod blocks;
mod dense;
mod gmres;
mod ilu;
mod inner;
mod lu;
pub mod ordering;
mod schur;
mod sparse;

pub use block_ldu::{BlockLdu, BlockSolverConfig, FluidStrategy, SolidStrategy, SolveTimings};
pub use blocks::{extract_blocks, merge_blocks, BlockLayout, BlockSystem, FLUID, MESH, SOLID};
pub use dense::{block_ldu_dense, exact_ldu_reference, DenseBlocks, LduVariant};
pub use gmres::{gmres, GmresConfig, GmresOutcome, IdentityPreconditioner, LinearOperator, Preconditioner};
pub use ilu::Ilu0;
pub use inner::{InnerSolver, InnerSolverKind};
pub use lu::{SparseLu, PIVOT_THRESHOLD};
pub use schur::{solid_block, solid_schur_solve, FluidUzawa, SolidSchur};
pub use sparse::{axpy, dot, norm2, norm_inf, CsrMatrix};
