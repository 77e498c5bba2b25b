//! Dirichlet constraints by value injection and row replacement.

use super::dofs::{DirichletKind, DofMap};
use crate::linalg::CsrMatrix;
use crate::tensor::Vec3;

/// Writes prescribed values into `values`; `g` is the inflow velocity at a point.
pub fn inject_dirichlet(values: &mut [f64], dofmap: &DofMap, g: &dyn Fn(&Vec3) -> Vec3) {
    for (dof, kind) in dofmap.constrained_dofs() {
        values[dof] = match kind {
            DirichletKind::Zero => 0.0,
            DirichletKind::Inflow(c) => {
                let node = dofmap.node_of(dof).expect("constrained dofs are nodal");
                g(dofmap.support_point(node))[c]
            }
        };
    }
}

pub fn zero_constrained(r: &mut [f64], dofmap: &DofMap) {
    for (dof, _) in dofmap.constrained_dofs() {
        r[dof] = 0.0;
    }
}

/// Replaces constrained rows by identity rows and eliminates the matching
/// columns; the right-hand side is zeroed at constrained dofs.
///
/// Column elimination is exact here because Newton updates vanish at
/// constrained dofs.
pub fn apply_dirichlet(a: &mut CsrMatrix, rhs: Option<&mut [f64]>, dofmap: &DofMap) {
    let n = a.nrows();
    let mut constrained = vec![false; n];
    for (dof, _) in dofmap.constrained_dofs() {
        constrained[dof] = true;
    }
    for (i, &row_fixed) in constrained.iter().enumerate() {
        let (cols, vals) = a.row_mut(i);
        for (j, v) in cols.iter().zip(vals.iter_mut()) {
            if row_fixed {
                *v = if *j == i { 1.0 } else { 0.0 };
            } else if constrained[*j] {
                *v = 0.0;
            }
        }
    }
    if let Some(r) = rhs {
        zero_constrained(r, dofmap);
    }
}
