use super::linear::{LinearSolverConfig, LinearizedFsi};
use super::newton::{newton_solve, LinearizedSystem, NewtonConfig, NewtonStats, NonlinearSystem};
use super::theta::ThetaScheme;
use crate::error::Result;
use crate::linalg::BlockLayout;
use crate::physics::{Assembler, FsiState, StepParams};
use crate::tensor::Vec3;

/// The nonlinear system of one time step.
pub struct FsiStep<'a> {
    pub asm: &'a Assembler<'a>,
    pub prev: &'a [f64],
    pub step: StepParams,
    pub solver: LinearSolverConfig,
    pub layout: BlockLayout,
}

impl<'a> FsiStep<'a> {
    pub fn new(asm: &'a Assembler<'a>, prev: &'a [f64], scheme: &ThetaScheme, solver: LinearSolverConfig) -> Self {
        FsiStep {
            asm,
            prev,
            step: scheme.step_params(),
            solver,
            layout: asm.dofmap().block_layout(),
        }
    }

    pub fn linearized(&self, x: &[f64]) -> Result<LinearizedFsi> {
        let (a, _) = self.asm.jacobian(x, self.prev, self.step)?;
        LinearizedFsi::new(a, &self.layout, &self.solver, self.step.dt * self.step.theta)
    }
}

impl NonlinearSystem for FsiStep<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.asm.residual(x, self.prev, self.step)
    }

    fn linearize(&self, x: &[f64]) -> Result<Box<dyn LinearizedSystem + '_>> {
        Ok(Box::new(self.linearized(x)?))
    }

    fn min_jacobian(&self, x: &[f64]) -> f64 {
        self.asm.min_jacobian(x)
    }
}

/// One θ-step from `prev` to `t_new`; `inflow(t, x)` gives the inflow velocity.
///
/// The previous solution, with Dirichlet values of the new time injected,
/// is the initial Newton guess.
pub fn advance(
    asm: &Assembler,
    prev: &FsiState,
    t_new: f64,
    scheme: &ThetaScheme,
    solver: LinearSolverConfig,
    newton: &NewtonConfig,
    inflow: &dyn Fn(f64, &Vec3) -> Vec3,
) -> Result<(FsiState, NewtonStats)> {
    let mut next = prev.clone();
    next.t = t_new;
    next.inject_dirichlet(asm.dofmap(), &|x| inflow(t_new, x));
    let sys = FsiStep::new(asm, &prev.values, scheme, solver);
    let (values, stats) = newton_solve(&sys, next.values, newton)?;
    Ok((FsiState { t: t_new, values }, stats))
}
