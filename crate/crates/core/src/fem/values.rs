use super::dofs::DofMap;
use super::element::{shape_eval, Tabulation};
use super::quadrature::QuadratureRule;
use crate::mesh::Mesh;
use crate::tensor::{vscale, Vec3};

/// Quadrature data of one cell in physical (reference-configuration) coordinates.
#[derive(Debug, Clone)]
pub struct CellValues {
    pub jxw: Vec<f64>,
    /// `grads[q][a]`: gradient of basis function `a` at point `q`.
    pub grads: Vec<Vec<Vec3>>,
}

/// Quadrature data of one cell facet.
#[derive(Debug, Clone)]
pub struct FacetValues {
    pub cell: usize,
    pub local: usize,
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<Vec3>>,
    pub pvalues: Vec<Vec<f64>>,
    /// Outward normal times surface weight at every point.
    pub normal_ds: Vec<Vec3>,
    pub points: Vec<Vec3>,
}

/// Precomputed basis values and gradients for all cells.
#[derive(Debug, Clone)]
pub struct FeCache {
    pub quad: QuadratureRule,
    pub values: Vec<Vec<f64>>,
    pub pvalues: Vec<Vec<f64>>,
    pub cells: Vec<CellValues>,
}

impl FeCache {
    pub fn new(mesh: &Mesh, dofmap: &DofMap) -> Self {
        let el = dofmap.vector_element();
        let quad = QuadratureRule::gauss(mesh.dim(), dofmap.elements().quadrature_points_1d());
        let tab = Tabulation::new(&el, &quad.points);
        let ptab = Tabulation::new(&dofmap.pressure_element(), &quad.points);
        let cells = (0..mesh.n_cells())
            .map(|c| {
                let mut jxw = Vec::with_capacity(quad.len());
                let mut grads = Vec::with_capacity(quad.len());
                for (q, p) in quad.points.iter().enumerate() {
                    let jac = mesh.map_jacobian(c, p);
                    let inv_t = jac.inverse().transpose();
                    jxw.push(jac.det() * quad.weights[q]);
                    grads.push(tab.grads[q].iter().map(|g| inv_t.apply(g)).collect());
                }
                CellValues { jxw, grads }
            })
            .collect();
        FeCache {
            quad,
            values: tab.values,
            pvalues: ptab.values,
            cells,
        }
    }
}

pub fn facet_values(mesh: &Mesh, dofmap: &DofMap, cell: usize, local: usize) -> FacetValues {
    let dim = mesh.dim();
    let el = dofmap.vector_element();
    let rule = QuadratureRule::facet(dim, dofmap.elements().quadrature_points_1d(), local);
    let (axis, side) = (local / 2, local % 2);
    let sign = if side == 1 { 1.0 } else { -1.0 };
    let mut out = FacetValues {
        cell,
        local,
        values: Vec::new(),
        grads: Vec::new(),
        pvalues: Vec::new(),
        normal_ds: Vec::new(),
        points: Vec::new(),
    };
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let (vals, rgrads) = shape_eval(&el, p);
        let (pv, _) = shape_eval(&dofmap.pressure_element(), p);
        let jac = mesh.map_jacobian(cell, p);
        let inv_t = jac.inverse().transpose();
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        out.normal_ds.push(vscale(&inv_t.apply(&e), sign * jac.det() * w));
        out.grads.push(rgrads.iter().map(|g| inv_t.apply(g)).collect());
        out.values.push(vals);
        out.pvalues.push(pv);
        out.points.push(mesh.map_point(cell, p));
    }
    out
}
