//! ALE kinematics, material laws, system assembly and output functionals.

mod assembly;
mod functionals;
mod inflow;
mod kinematics;
mod material;
mod state;

pub use assembly::{assemble_jacobian, assemble_residual, Assembler, StepParams};
pub use functionals::{evaluate_drag_lift, evaluate_point, force_facets, locate_in_cell, locate_point};
pub use inflow::{inflow_profile, smoothing, Benchmark};
pub use kinematics::{deformation_state, deformation_state_at, shape_derivatives, KinematicState, ShapeDerivatives};
pub use material::{fluid_stress, stvk_stress, MaterialParams};
pub use state::FsiState;
