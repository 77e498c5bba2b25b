use super::kinematics::KinematicState;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Fluid and solid material constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub rho_f: f64,
    pub nu_f: f64,
    pub rho_s: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Default for MaterialParams {
    /// Values of the FSI-2 benchmark, also used for the 3D configuration.
    fn default() -> Self {
        MaterialParams {
            rho_f: 1e3,
            nu_f: 1e-3,
            rho_s: 1e4,
            lambda: 2e6,
            mu: 0.5e6,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.rho_f, self.nu_f, self.rho_s, self.lambda, self.mu];
        if all.iter().all(|x| *x > 0.0 && x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Config("material parameters must be positive".into()))
        }
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }
}

/// Saint Venant–Kirchhoff second Piola–Kirchhoff stress `2μE + λ tr(E) I`.
pub fn stvk_stress(e: &Tensor, params: &MaterialParams) -> Tensor {
    e.scale(2.0 * params.mu) + Tensor::identity(e.dim).scale(params.lambda * e.trace())
}

/// Directional derivative of [`stvk_stress`] with respect to `E` in direction `de`.
pub fn stvk_tangent(de: &Tensor, params: &MaterialParams) -> Tensor {
    let mut out = Tensor::zeros(de.dim);
    let tr = de.trace();
    for i in 0..de.dim {
        for j in 0..de.dim {
            out.m[i][j] = 2.0 * params.mu * de.m[i][j];
        }
        out.m[i][i] += params.lambda * tr;
    }
    out
}

/// ALE Cauchy stress `−pI + ρν(∇v F⁻¹ + F⁻ᵀ ∇vᵀ)`.
pub fn fluid_stress(grad_v: &Tensor, p: f64, k: &KinematicState, params: &MaterialParams) -> Tensor {
    let l = *grad_v * k.f_inv;
    (l + l.transpose()).scale(params.rho_f * params.nu_f) - Tensor::identity(grad_v.dim).scale(p)
}
