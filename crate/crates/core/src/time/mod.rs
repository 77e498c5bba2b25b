//! One-step-θ time stepping and the quasi-Newton solver.

mod linear;
mod newton;
mod ode;
mod stepper;
mod theta;

pub use linear::{LinearMethod, LinearSolverConfig, LinearizedFsi};
pub use newton::{newton_solve, LinearizedSystem, NewtonConfig, NewtonStats, NonlinearSystem};
pub use ode::ScalarOde;
pub use stepper::{advance, FsiStep};
pub use theta::{ThetaScheme, ThetaVariant};
