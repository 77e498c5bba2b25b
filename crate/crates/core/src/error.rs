//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// The three diagonal blocks of the monolithic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockId {
    Mesh,
    Solid,
    Fluid,
}

impl std::fmt::Display for BlockId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            BlockId::Mesh => "mesh",
            BlockId::Solid => "solid",
            BlockId::Fluid => "fluid",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("refinement level {level} exceeds the supported maximum {max} for this mesh")]
    RefineLimit { level: usize, max: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("config value out of range for `{key}` (line {line}): {msg}")]
    ConfigRange { key: String, line: usize, msg: String },

    #[error("non-positive ALE determinant J = {det:.3e} in cell {cell} at ({x:.4}, {y:.4}, {z:.4})")]
    MeshDegeneration {
        cell: usize,
        det: f64,
        x: f64,
        y: f64,
        z: f64,
    },

    #[error("point ({x}, {y}, {z}) not found in any cell")]
    PointNotFound { x: f64, y: f64, z: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix: zero pivot at step {step}")]
    SingularMatrix { step: usize },

    #[error("GMRES did not reach the requested reduction after {iterations} iterations (relative residual {relative_residual:.3e})")]
    GmresNonConvergence {
        iterations: usize,
        relative_residual: f64,
        best: Vec<f64>,
        history: Vec<f64>,
    },

    #[error("inner solve in the {block} block failed: {source}")]
    InnerSolver {
        block: BlockId,
        #[source]
        source: Box<Error>,
    },

    #[error("Newton iteration did not converge within {} iterations", .stats.iterations)]
    NewtonNonConvergence {
        stats: Box<crate::time::NewtonStats>,
    },

    #[error("matrix market parse error at line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error("csv parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
