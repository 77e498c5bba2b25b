use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Deformation quantities of the ALE map at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicState {
    pub grad_u: Tensor,
    pub f: Tensor,
    pub j: f64,
    pub f_inv: Tensor,
    /// Green–Lagrange strain `½(FᵀF − I)`.
    pub e: Tensor,
}

impl KinematicState {
    pub fn f_inv_t(&self) -> Tensor {
        self.f_inv.transpose()
    }
}

/// Computes `F = I + ∇u`, `J`, `F⁻¹` and `E`. Fails when `J ≤ 0`.
pub fn deformation_state(grad_u: &Tensor) -> Result<KinematicState> {
    deformation_state_at(grad_u, usize::MAX, [f64::NAN; 3])
}

/// As [`deformation_state`], reporting `cell` and `x` on failure.
pub fn deformation_state_at(grad_u: &Tensor, cell: usize, x: [f64; 3]) -> Result<KinematicState> {
    let dim = grad_u.dim;
    let f = Tensor::identity(dim) + *grad_u;
    let j = f.det();
    if !(j > 0.0) {
        return Err(Error::MeshDegeneration {
            cell,
            det: j,
            x: x[0],
            y: x[1],
            z: x[2],
        });
    }
    let f_inv = f.inverse();
    let e = (f.transpose() * f - Tensor::identity(dim)).scale(0.5);
    Ok(KinematicState {
        grad_u: *grad_u,
        f,
        j,
        f_inv,
        e,
    })
}

/// Directional derivatives of the kinematic quantities along `∇δu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeDerivatives {
    pub df: Tensor,
    pub dj: f64,
    pub df_inv: Tensor,
    pub df_inv_t: Tensor,
    pub de: Tensor,
}

pub fn shape_derivatives(k: &KinematicState, grad_du: &Tensor) -> ShapeDerivatives {
    let df = *grad_du;
    let dj = k.j * (k.f_inv * df).trace();
    let df_inv = -(k.f_inv * df * k.f_inv);
    let de = (df.transpose() * k.f + k.f.transpose() * df).scale(0.5);
    ShapeDerivatives {
        df,
        dj,
        df_inv,
        df_inv_t: df_inv.transpose(),
        de,
    }
}
