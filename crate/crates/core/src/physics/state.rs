use crate::fem::{dirichlet, DofMap};
use crate::tensor::Vec3;

/// Nodal displacement, velocity and pressure coefficients at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FsiState {
    pub t: f64,
    pub values: Vec<f64>,
}

impl FsiState {
    pub fn zeros(dofmap: &DofMap, t: f64) -> Self {
        FsiState {
            t,
            values: vec![0.0; dofmap.n_dofs()],
        }
    }

    pub fn u(&self, dofmap: &DofMap, node: usize) -> Vec3 {
        let mut out = [0.0; 3];
        for (a, o) in out.iter_mut().enumerate().take(dofmap.dim()) {
            *o = self.values[dofmap.u_dof(node, a)];
        }
        out
    }

    pub fn v(&self, dofmap: &DofMap, node: usize) -> Vec3 {
        let mut out = [0.0; 3];
        for (a, o) in out.iter_mut().enumerate().take(dofmap.dim()) {
            *o = self.values[dofmap.v_dof(node, a)];
        }
        out
    }

    pub fn pressure(&self, dofmap: &DofMap) -> &[f64] {
        &self.values[dofmap.n_nodal_dofs()..]
    }

    /// Sets every constrained dof to its prescribed value.
    pub fn inject_dirichlet(&mut self, dofmap: &DofMap, g: &dyn Fn(&Vec3) -> Vec3) {
        dirichlet::inject_dirichlet(&mut self.values, dofmap, g);
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }
}
