//! Quadrilateral/hexahedral meshes with fluid/solid subdomains.
//!
//! Cells use tensor-product vertex ordering: local vertex `b` has reference
//! coordinates given by its bits (`b & 1` along ξ, `b >> 1 & 1` along η,
//! `b >> 2 & 1` along ζ). Local facet `2a + s` is the facet orthogonal to
//! reference axis `a` at coordinate `s`.

mod generators;
pub mod io;
mod refine;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::tensor::{Tensor, Vec3};

pub use generators::{
    build_box3d_mesh, build_fsi2_mesh, single_cell_mesh, unit_square_mesh, Box3dGeometry, Fsi2Geometry,
    MAX_CELLS,
};
pub use refine::refine_uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Fluid,
    Solid,
}

/// Tags on the outer boundary of the reference domain.
///
/// `Side` marks the lateral `z = ±H` channel walls of the 3D configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Inflow,
    Outflow,
    Top,
    Bottom,
    Side,
    Obstacle,
    SolidBase,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Inflow => "inflow",
            BoundaryTag::Outflow => "outflow",
            BoundaryTag::Top => "top",
            BoundaryTag::Bottom => "bottom",
            BoundaryTag::Side => "side",
            BoundaryTag::Obstacle => "obstacle",
            BoundaryTag::SolidBase => "solid_base",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "inflow" => BoundaryTag::Inflow,
            "outflow" => BoundaryTag::Outflow,
            "top" => BoundaryTag::Top,
            "bottom" => BoundaryTag::Bottom,
            "side" => BoundaryTag::Side,
            "obstacle" => BoundaryTag::Obstacle,
            "solid_base" => BoundaryTag::SolidBase,
            _ => return None,
        })
    }
}

/// Sorted vertex ids of a facet, padded with `usize::MAX`.
pub type FacetKey = [usize; 4];

pub fn facet_key(vertices: &[usize]) -> FacetKey {
    let mut key = [usize::MAX; 4];
    key[..vertices.len()].copy_from_slice(vertices);
    key.sort_unstable();
    key
}

/// Exact circle used to snap refined obstacle nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec3,
    pub radius: f64,
}

impl Circle {
    pub fn project(&self, p: &Vec3) -> Vec3 {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let r = (dx * dx + dy * dy).sqrt();
        [
            self.center[0] + self.radius * dx / r,
            self.center[1] + self.radius * dy / r,
            p[2],
        ]
    }

    pub fn contains_on_boundary(&self, p: &Vec3, tol: f64) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        ((dx * dx + dy * dy).sqrt() - self.radius).abs() <= tol
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<Vec3>,
    cells: Vec<[usize; 8]>,
    subdomains: Vec<Subdomain>,
    facet_tags: BTreeMap<FacetKey, BoundaryTag>,
    obstacle: Option<Circle>,
}

/// One cell-facet incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacetRef {
    pub cell: usize,
    pub local: usize,
}

/// Facet-to-cell incidence computed by [`Mesh::facet_adjacency`].
#[derive(Debug, Clone, Default)]
pub struct FacetAdjacency {
    pub facets: HashMap<FacetKey, Vec<FacetRef>>,
}

impl FacetAdjacency {
    pub fn neighbors(&self, key: &FacetKey) -> &[FacetRef] {
        self.facets.get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Mesh {
    /// Assembles a mesh from raw parts. Cells list `2^dim` vertex ids each.
    pub fn from_parts(
        dim: usize,
        nodes: Vec<Vec3>,
        cells: Vec<Vec<usize>>,
        subdomains: Vec<Subdomain>,
        facet_tags: BTreeMap<FacetKey, BoundaryTag>,
        obstacle: Option<Circle>,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("unsupported dimension {dim}")));
        }
        if cells.len() != subdomains.len() {
            return Err(Error::InvalidMesh("cell/subdomain count mismatch".into()));
        }
        let nv = 1 << dim;
        let mut packed = Vec::with_capacity(cells.len());
        for (c, verts) in cells.iter().enumerate() {
            if verts.len() != nv {
                return Err(Error::InvalidMesh(format!("cell {c} has {} vertices, expected {nv}", verts.len())));
            }
            let mut arr = [usize::MAX; 8];
            for (k, &v) in verts.iter().enumerate() {
                if v >= nodes.len() {
                    return Err(Error::InvalidMesh(format!("cell {c} references missing node {v}")));
                }
                arr[k] = v;
            }
            packed.push(arr);
        }
        Ok(Mesh {
            dim,
            nodes,
            cells: packed,
            subdomains,
            facet_tags,
            obstacle,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices_per_cell(&self) -> usize {
        1 << self.dim
    }

    pub fn facets_per_cell(&self) -> usize {
        2 * self.dim
    }

    pub fn node(&self, i: usize) -> &Vec3 {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cells[c][..self.vertices_per_cell()]
    }

    pub fn subdomain(&self, c: usize) -> Subdomain {
        self.subdomains[c]
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn obstacle(&self) -> Option<&Circle> {
        self.obstacle.as_ref()
    }

    pub fn facet_tags(&self) -> &BTreeMap<FacetKey, BoundaryTag> {
        &self.facet_tags
    }

    pub fn facet_tag(&self, key: &FacetKey) -> Option<BoundaryTag> {
        self.facet_tags.get(key).copied()
    }

    pub fn cells_in(&self, sub: Subdomain) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_cells()).filter(move |&c| self.subdomains[c] == sub)
    }

    /// Local vertex indices of local facet `f`, in tensor order on the facet.
    pub fn local_facet_vertices(dim: usize, f: usize) -> Vec<usize> {
        let (axis, side) = (f / 2, f % 2);
        (0..1usize << dim).filter(|b| (b >> axis) & 1 == side).collect()
    }

    pub fn facet_vertices(&self, c: usize, f: usize) -> Vec<usize> {
        let verts = self.cell_vertices(c);
        Self::local_facet_vertices(self.dim, f)
            .into_iter()
            .map(|b| verts[b])
            .collect()
    }

    pub fn cell_facet_key(&self, c: usize, f: usize) -> FacetKey {
        facet_key(&self.facet_vertices(c, f))
    }

    pub fn facet_adjacency(&self) -> FacetAdjacency {
        let mut facets: HashMap<FacetKey, Vec<FacetRef>> = HashMap::with_capacity(self.n_cells() * self.dim);
        for c in 0..self.n_cells() {
            for f in 0..self.facets_per_cell() {
                facets
                    .entry(self.cell_facet_key(c, f))
                    .or_default()
                    .push(FacetRef { cell: c, local: f });
            }
        }
        FacetAdjacency { facets }
    }

    /// Q1 geometry map of cell `c` at reference point `xi`.
    pub fn map_point(&self, c: usize, xi: &Vec3) -> Vec3 {
        let mut x = [0.0; 3];
        for (b, &v) in self.cell_vertices(c).iter().enumerate() {
            let w = q1_vertex_weight(self.dim, b, xi);
            for (xk, pk) in x.iter_mut().zip(self.nodes[v].iter()) {
                *xk += w * pk;
            }
        }
        x
    }

    /// Jacobian `∂x_i/∂ξ_j` of the Q1 geometry map.
    pub fn map_jacobian(&self, c: usize, xi: &Vec3) -> Tensor {
        let mut jac = Tensor::zeros(self.dim);
        for (b, &v) in self.cell_vertices(c).iter().enumerate() {
            let g = q1_vertex_gradient(self.dim, b, xi);
            let p = &self.nodes[v];
            for i in 0..self.dim {
                for j in 0..self.dim {
                    jac.m[i][j] += p[i] * g[j];
                }
            }
        }
        jac
    }

    pub fn cell_center(&self, c: usize) -> Vec3 {
        self.map_point(c, &[0.5, 0.5, 0.5])
    }

    /// Cell measure by Gauss quadrature of the Q1 map determinant.
    pub fn cell_measure(&self, c: usize) -> f64 {
        let rule = crate::fem::QuadratureRule::gauss(self.dim, 3);
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * self.map_jacobian(c, p).det())
            .sum()
    }

    pub fn subdomain_measure(&self, sub: Subdomain) -> f64 {
        self.cells_in(sub).map(|c| self.cell_measure(c)).sum()
    }

    /// Facets shared by one Fluid and one Solid cell, as `(fluid ref, solid ref)`.
    pub fn interface_facets(&self, adj: &FacetAdjacency) -> Vec<(FacetRef, FacetRef)> {
        let mut out = Vec::new();
        for refs in adj.facets.values() {
            if refs.len() == 2 {
                let (a, b) = (refs[0], refs[1]);
                match (self.subdomains[a.cell], self.subdomains[b.cell]) {
                    (Subdomain::Fluid, Subdomain::Solid) => out.push((a, b)),
                    (Subdomain::Solid, Subdomain::Fluid) => out.push((b, a)),
                    _ => {}
                }
            }
        }
        out.sort_by_key(|(f, _)| (f.cell, f.local));
        out
    }

    /// Checks every structural invariant: positive orientation, conformity,
    /// interface incidence and complete boundary tagging.
    pub fn validate(&self) -> Result<()> {
        if self.cells_in(Subdomain::Fluid).next().is_none() && self.cells_in(Subdomain::Solid).next().is_none() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        // Orientation at corners and Gauss points.
        let rule = crate::fem::QuadratureRule::gauss(self.dim, 2);
        let corners: Vec<Vec3> = (0..self.vertices_per_cell())
            .map(|b| [(b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64])
            .collect();
        for c in 0..self.n_cells() {
            for p in corners.iter().chain(rule.points.iter()) {
                let det = self.map_jacobian(c, p).det();
                if det <= 0.0 {
                    return Err(Error::InvalidMesh(format!("cell {c} has non-positive orientation ({det:.3e})")));
                }
            }
        }
        let adj = self.facet_adjacency();
        for (key, refs) in &adj.facets {
            match refs.len() {
                1 => {
                    if !self.facet_tags.contains_key(key) {
                        return Err(Error::InvalidMesh(format!(
                            "untagged boundary facet of cell {} (possible hanging node)",
                            refs[0].cell
                        )));
                    }
                }
                2 => {
                    if self.facet_tags.contains_key(key) {
                        return Err(Error::InvalidMesh(format!("interior facet of cell {} is tagged", refs[0].cell)));
                    }
                }
                n => {
                    return Err(Error::InvalidMesh(format!("facet shared by {n} cells")));
                }
            }
        }
        for key in self.facet_tags.keys() {
            if !adj.facets.contains_key(key) {
                return Err(Error::InvalidMesh("facet tag refers to a non-existing facet".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn q1_vertex_weight(dim: usize, b: usize, xi: &Vec3) -> f64 {
    (0..dim)
        .map(|a| if (b >> a) & 1 == 1 { xi[a] } else { 1.0 - xi[a] })
        .product()
}

pub(crate) fn q1_vertex_gradient(dim: usize, b: usize, xi: &Vec3) -> Vec3 {
    let mut g = [0.0; 3];
    for (j, gj) in g.iter_mut().enumerate().take(dim) {
        *gj = (0..dim)
            .map(|a| {
                let hi = (b >> a) & 1 == 1;
                if a == j {
                    if hi {
                        1.0
                    } else {
                        -1.0
                    }
                } else if hi {
                    xi[a]
                } else {
                    1.0 - xi[a]
                }
            })
            .product();
    }
    g
}
