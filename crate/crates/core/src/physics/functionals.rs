use super::kinematics::deformation_state;
use super::material::{fluid_stress, MaterialParams};
use crate::error::{Error, Result};
use crate::fem::{facet_values, shape_eval, DofMap};
use crate::mesh::{BoundaryTag, Mesh, Subdomain};
use crate::tensor::{Tensor, Vec3};

/// Fluid facets on the obstacle and on the fluid side of the interface, as
/// `(cell, local facet)` pairs.
pub fn force_facets(mesh: &Mesh) -> Vec<(usize, usize)> {
    let adj = mesh.facet_adjacency();
    let mut out = Vec::new();
    for c in mesh.cells_in(Subdomain::Fluid) {
        for f in 0..mesh.facets_per_cell() {
            let key = mesh.cell_facet_key(c, f);
            let on_obstacle = mesh.facet_tag(&key) == Some(BoundaryTag::Obstacle);
            let on_interface = adj
                .neighbors(&key)
                .iter()
                .any(|r| mesh.subdomain(r.cell) == Subdomain::Solid);
            if on_obstacle || on_interface {
                out.push((c, f));
            }
        }
    }
    out
}

/// Force exerted by the fluid on the obstacle and the elastic structure.
///
/// Integrates `−J σ F⁻ᵀ n` over [`force_facets`], where `n` is the outward
/// normal of the fluid cell; the result has `dim` meaningful components
/// (drag, lift and, in 3D, the spanwise force).
pub fn evaluate_drag_lift(mesh: &Mesh, dofmap: &DofMap, params: &MaterialParams, values: &[f64]) -> Result<Vec3> {
    let d = mesh.dim();
    let mut force = [0.0; 3];
    for (c, f) in force_facets(mesh) {
        let fv = facet_values(mesh, dofmap, c, f);
        let dofs = dofmap.cell_dofs(c);
        let nb = fv.values[0].len();
        let pofs = 2 * d * nb;
        for q in 0..fv.points.len() {
            let mut gu = Tensor::zeros(d);
            let mut gv = Tensor::zeros(d);
            for a in 0..d {
                for (i, g) in fv.grads[q].iter().enumerate() {
                    let u = values[dofs[a * nb + i]];
                    let v = values[dofs[(d + a) * nb + i]];
                    for b in 0..d {
                        gu.m[a][b] += u * g[b];
                        gv.m[a][b] += v * g[b];
                    }
                }
            }
            let p: f64 = fv.pvalues[q]
                .iter()
                .enumerate()
                .map(|(k, psi)| values[dofs[pofs + k]] * psi)
                .sum();
            let k = deformation_state(&gu).map_err(|e| match e {
                Error::MeshDegeneration { det, .. } => Error::MeshDegeneration {
                    cell: c,
                    det,
                    x: fv.points[q][0],
                    y: fv.points[q][1],
                    z: fv.points[q][2],
                },
                e => e,
            })?;
            let sigma = fluid_stress(&gv, p, &k, params);
            let t = (sigma * k.f_inv_t()).scale(k.j).apply(&fv.normal_ds[q]);
            for a in 0..d {
                force[a] -= t[a];
            }
        }
    }
    Ok(force)
}

/// Reference coordinates of `x` in cell `c`, if the Q1 map inversion
/// converges to a point inside the reference cell.
pub fn locate_in_cell(mesh: &Mesh, c: usize, x: &Vec3) -> Option<Vec3> {
    let d = mesh.dim();
    let mut xi = [0.5, 0.5, if d == 3 { 0.5 } else { 0.0 }];
    for _ in 0..50 {
        let y = mesh.map_point(c, &xi);
        let mut r = [0.0; 3];
        for a in 0..d {
            r[a] = x[a] - y[a];
        }
        let step = mesh.map_jacobian(c, &xi).inverse().apply(&r);
        let mut size: f64 = 0.0;
        for a in 0..d {
            xi[a] += step[a];
            size = size.max(step[a].abs());
        }
        if !xi.iter().all(|v| v.is_finite()) || xi.iter().any(|v| v.abs() > 10.0) {
            return None;
        }
        if size < 1e-14 {
            break;
        }
    }
    let tol = 1e-9;
    if xi[..d].iter().all(|&v| v >= -tol && v <= 1.0 + tol) {
        let mut clamped = xi;
        for v in clamped[..d].iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        Some(clamped)
    } else {
        None
    }
}

/// Finds a cell containing `x`, preferring solid cells.
pub fn locate_point(mesh: &Mesh, x: &Vec3) -> Result<(usize, Vec3)> {
    let order = mesh.cells_in(Subdomain::Solid).chain(mesh.cells_in(Subdomain::Fluid));
    for c in order {
        if let Some(xi) = locate_in_cell(mesh, c, x) {
            return Ok((c, xi));
        }
    }
    Err(Error::PointNotFound {
        x: x[0],
        y: x[1],
        z: x[2],
    })
}

/// Displacement interpolated at reference point `x`.
pub fn evaluate_point(mesh: &Mesh, dofmap: &DofMap, values: &[f64], x: &Vec3) -> Result<Vec3> {
    let (c, xi) = locate_point(mesh, x)?;
    let (n, _) = shape_eval(&dofmap.vector_element(), &xi);
    let dofs = dofmap.cell_dofs(c);
    let nb = n.len();
    let mut out = [0.0; 3];
    for (a, o) in out.iter_mut().enumerate().take(mesh.dim()) {
        *o = n.iter().enumerate().map(|(i, s)| s * values[dofs[a * nb + i]]).sum();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{distribute_dofs, ElementPair};
    use crate::mesh::{build_fsi2_mesh, Fsi2Geometry};

    #[test]
    fn constant_pressure_gives_no_force() {
        let m = build_fsi2_mesh(0).unwrap();
        let d = distribute_dofs(&m, ElementPair::new(2, 2)).unwrap();
        let mut x = vec![0.0; d.n_dofs()];
        for c in m.cells_in(Subdomain::Fluid) {
            let r = d.pressure_dofs(c).unwrap();
            x[r.start] = 3.0;
        }
        let f = evaluate_drag_lift(&m, &d, &MaterialParams::default(), &x).unwrap();
        assert!(f[0].abs() < 1e-12 && f[1].abs() < 1e-12, "{f:?}");
    }

    #[test]
    fn nodal_value_reproduced() {
        let m = build_fsi2_mesh(1).unwrap();
        let d = distribute_dofs(&m, ElementPair::new(2, 2)).unwrap();
        let mut x = vec![0.0; d.n_dofs()];
        for node in 0..d.n_support() {
            let p = d.support_point(node);
            x[d.u_dof(node, 0)] = p[0] * p[1];
            x[d.u_dof(node, 1)] = 2.0 - p[0];
        }
        let r = Fsi2Geometry::REFERENCE_POINT;
        let u = evaluate_point(&m, &d, &x, &r).unwrap();
        assert!((u[0] - r[0] * r[1]).abs() < 1e-12);
        assert!((u[1] - (2.0 - r[0])).abs() < 1e-12);
    }

    #[test]
    fn outside_point_is_an_error() {
        let m = build_fsi2_mesh(0).unwrap();
        let d = distribute_dofs(&m, ElementPair::new(1, 2)).unwrap();
        let x = vec![0.0; d.n_dofs()];
        assert!(matches!(
            evaluate_point(&m, &d, &x, &[5.0, 5.0, 0.0]),
            Err(Error::PointNotFound { .. })
        ));
    }
}
