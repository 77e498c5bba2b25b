use crate::error::{Error, Result};
use crate::linalg::norm_inf;

/// Per-step record of the nonlinear iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonStats {
    pub iterations: usize,
    /// ∞-norms of the residual, starting with the initial residual.
    pub residual_history: Vec<f64>,
    pub reassemblies: usize,
    pub gmres_iterations: Vec<usize>,
    /// Smallest ALE determinant seen at any quadrature point.
    pub min_jacobian: f64,
}

impl NewtonStats {
    pub fn mean_gmres_iterations(&self) -> f64 {
        if self.gmres_iterations.is_empty() {
            0.0
        } else {
            self.gmres_iterations.iter().sum::<usize>() as f64 / self.gmres_iterations.len() as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Relative ∞-norm reduction that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Reassemble when `‖r_k‖ > factor · ‖r_{k−1}‖`.
    pub reassembly_factor: f64,
    pub always_reassemble: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tolerance: 1e-6,
            max_iterations: 30,
            reassembly_factor: 0.1,
            always_reassemble: false,
        }
    }
}

/// Linear solve with a fixed (possibly outdated) Jacobian.
pub trait LinearizedSystem {
    /// Returns `x` with `A x ≈ b` and the number of Krylov iterations used.
    fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, usize)>;
}

pub trait NonlinearSystem {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn linearize(&self, x: &[f64]) -> Result<Box<dyn LinearizedSystem + '_>>;
    fn min_jacobian(&self, _x: &[f64]) -> f64 {
        f64::INFINITY
    }
}

/// Quasi-Newton iteration started from `x`.
///
/// The Jacobian is assembled in the first iteration and afterwards only when
/// the residual contracted by less than `reassembly_factor`.
pub fn newton_solve(sys: &dyn NonlinearSystem, mut x: Vec<f64>, cfg: &NewtonConfig) -> Result<(Vec<f64>, NewtonStats)> {
    let mut r = sys.residual(&x)?;
    let r0 = norm_inf(&r);
    let mut stats = NewtonStats {
        residual_history: vec![r0],
        ..Default::default()
    };
    if r0 == 0.0 {
        stats.min_jacobian = sys.min_jacobian(&x);
        return Ok((x, stats));
    }
    let mut lin: Option<Box<dyn LinearizedSystem + '_>> = None;
    let mut prev = r0;
    let mut current = r0;
    loop {
        let rebuild = lin.is_none() || cfg.always_reassemble || current > cfg.reassembly_factor * prev;
        if rebuild {
            lin = Some(sys.linearize(&x)?);
            stats.reassemblies += 1;
        }
        let (dx, its) = lin.as_ref().expect("linearization present").solve(&r)?;
        stats.gmres_iterations.push(its);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi -= d;
        }
        r = sys.residual(&x)?;
        prev = current;
        current = norm_inf(&r);
        stats.iterations += 1;
        stats.residual_history.push(current);
        if current < cfg.tolerance * r0 {
            break;
        }
        if !current.is_finite() || stats.iterations >= cfg.max_iterations {
            return Err(Error::NewtonNonConvergence { stats: Box::new(stats) });
        }
    }
    stats.min_jacobian = sys.min_jacobian(&x);
    Ok((x, stats))
}
