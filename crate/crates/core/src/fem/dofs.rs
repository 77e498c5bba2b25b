use std::collections::HashMap;

use super::element::{ElementPair, ScalarElement};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh, Subdomain};
use crate::tensor::Vec3;

/// Which of the three diagonal blocks a dof belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockClass {
    Mesh,
    Solid,
    Fluid,
}

impl BlockClass {
    pub const ALL: [BlockClass; 3] = [BlockClass::Mesh, BlockClass::Solid, BlockClass::Fluid];

    pub fn index(self) -> usize {
        match self {
            BlockClass::Mesh => 0,
            BlockClass::Solid => 1,
            BlockClass::Fluid => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Displacement(usize),
    Velocity(usize),
    Pressure,
}

/// Prescribed value of a constrained dof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirichletKind {
    Zero,
    /// Component of the inflow profile.
    Inflow(usize),
}

/// Global numbering of displacement, velocity and pressure dofs.
///
/// Every support node carries `d` displacement dofs followed by `d` velocity
/// dofs. Pressure dofs follow all nodal dofs, grouped per fluid cell.
#[derive(Debug, Clone)]
pub struct DofMap {
    dim: usize,
    elements: ElementPair,
    support: Vec<Vec3>,
    node_sub: Vec<u8>,
    cell_nodes: Vec<Vec<usize>>,
    fluid_index: Vec<Option<usize>>,
    n_fluid_cells: usize,
    constraints: Vec<Option<DirichletKind>>,
    class: Vec<BlockClass>,
    block_dofs: [Vec<usize>; 3],
    block_pos: Vec<usize>,
}

const TOUCH_FLUID: u8 = 1;
const TOUCH_SOLID: u8 = 2;

/// Numbers dofs on a mesh with both subdomains present.
pub fn distribute_dofs(mesh: &Mesh, elements: ElementPair) -> Result<DofMap> {
    if mesh.cells_in(Subdomain::Fluid).next().is_none() || mesh.cells_in(Subdomain::Solid).next().is_none() {
        return Err(Error::Config("the mesh needs both Fluid and Solid cells".into()));
    }
    DofMap::build(mesh, elements)
}

/// Numbers dofs without requiring both subdomains, for single-field test meshes.
pub fn distribute_dofs_single_domain(mesh: &Mesh, elements: ElementPair) -> Result<DofMap> {
    DofMap::build(mesh, elements)
}

impl DofMap {
    fn build(mesh: &Mesh, elements: ElementPair) -> Result<DofMap> {
        let dim = mesh.dim();
        if elements.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: elements.dim,
            });
        }
        let el = elements.vector();
        let k = elements.order;
        let nloc = el.n_dofs();
        let nv = mesh.vertices_per_cell();
        let ref_points = el.support_points();

        let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut support = Vec::new();
        let mut node_sub = Vec::new();
        let mut cell_nodes = Vec::with_capacity(mesh.n_cells());
        for c in 0..mesh.n_cells() {
            let verts = mesh.cell_vertices(c);
            let touch = match mesh.subdomain(c) {
                Subdomain::Fluid => TOUCH_FLUID,
                Subdomain::Solid => TOUCH_SOLID,
            };
            let mut ids = Vec::with_capacity(nloc);
            for (i, p) in ref_points.iter().enumerate() {
                let m = el.multi_index(i);
                let mut ent: Vec<usize> = (0..nv)
                    .filter(|&b| (0..dim).all(|a| (m[a] > 0 && m[a] < k) || ((b >> a) & 1) * k == m[a]))
                    .map(|b| verts[b])
                    .collect();
                ent.sort_unstable();
                let id = *lookup.entry(ent).or_insert_with(|| {
                    support.push(mesh.map_point(c, p));
                    node_sub.push(0);
                    support.len() - 1
                });
                node_sub[id] |= touch;
                ids.push(id);
            }
            cell_nodes.push(ids);
        }

        let mut fluid_index = vec![None; mesh.n_cells()];
        let mut n_fluid_cells = 0;
        for c in mesh.cells_in(Subdomain::Fluid) {
            fluid_index[c] = Some(n_fluid_cells);
            n_fluid_cells += 1;
        }
        let np = elements.pressure().n_dofs();
        let n_nodal = support.len() * 2 * dim;
        let n_dofs = n_nodal + n_fluid_cells * np;

        let mut constraints: Vec<Option<DirichletKind>> = vec![None; n_dofs];
        let adj = mesh.facet_adjacency();
        for (key, tag) in mesh.facet_tags() {
            let r = adj.neighbors(key)[0];
            let (axis, side) = (r.local / 2, r.local % 2);
            for i in 0..nloc {
                if el.multi_index(i)[axis] != side * k {
                    continue;
                }
                let node = cell_nodes[r.cell][i];
                for a in 0..dim {
                    set_constraint(&mut constraints[node * 2 * dim + a], DirichletKind::Zero);
                    let v = match tag {
                        BoundaryTag::Outflow => None,
                        BoundaryTag::Inflow => Some(DirichletKind::Inflow(a)),
                        _ => Some(DirichletKind::Zero),
                    };
                    if let Some(kind) = v {
                        set_constraint(&mut constraints[node * 2 * dim + dim + a], kind);
                    }
                }
            }
        }

        let mut class = vec![BlockClass::Fluid; n_dofs];
        for (n, &touch) in node_sub.iter().enumerate() {
            let fluid_only = touch == TOUCH_FLUID;
            for a in 0..dim {
                class[n * 2 * dim + a] = if fluid_only { BlockClass::Mesh } else { BlockClass::Solid };
                class[n * 2 * dim + dim + a] = if fluid_only { BlockClass::Fluid } else { BlockClass::Solid };
            }
        }

        let n_nodes = support.len();
        let mut block_dofs: [Vec<usize>; 3] = Default::default();
        for n in 0..n_nodes {
            for a in 0..dim {
                let d = n * 2 * dim + a;
                if class[d] == BlockClass::Mesh {
                    block_dofs[0].push(d);
                }
            }
        }
        for field in 0..2 {
            for n in 0..n_nodes {
                if node_sub[n] & TOUCH_SOLID != 0 {
                    for a in 0..dim {
                        block_dofs[1].push(n * 2 * dim + field * dim + a);
                    }
                }
            }
        }
        for n in 0..n_nodes {
            if node_sub[n] == TOUCH_FLUID {
                for a in 0..dim {
                    block_dofs[2].push(n * 2 * dim + dim + a);
                }
            }
        }
        block_dofs[2].extend(n_nodal..n_dofs);
        let mut block_pos = vec![usize::MAX; n_dofs];
        for list in &block_dofs {
            for (i, &d) in list.iter().enumerate() {
                block_pos[d] = i;
            }
        }

        Ok(DofMap {
            dim,
            elements,
            support,
            node_sub,
            cell_nodes,
            fluid_index,
            n_fluid_cells,
            constraints,
            class,
            block_dofs,
            block_pos,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> ElementPair {
        self.elements
    }

    pub fn vector_element(&self) -> ScalarElement {
        self.elements.vector()
    }

    pub fn pressure_element(&self) -> ScalarElement {
        self.elements.pressure()
    }

    pub fn n_dofs(&self) -> usize {
        self.constraints.len()
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }

    pub fn n_nodal_dofs(&self) -> usize {
        self.support.len() * 2 * self.dim
    }

    pub fn n_pressure_dofs(&self) -> usize {
        self.n_dofs() - self.n_nodal_dofs()
    }

    pub fn n_fluid_cells(&self) -> usize {
        self.n_fluid_cells
    }

    pub fn support_point(&self, node: usize) -> &Vec3 {
        &self.support[node]
    }

    pub fn node_touches(&self, node: usize, sub: Subdomain) -> bool {
        let bit = match sub {
            Subdomain::Fluid => TOUCH_FLUID,
            Subdomain::Solid => TOUCH_SOLID,
        };
        self.node_sub[node] & bit != 0
    }

    pub fn is_interface_node(&self, node: usize) -> bool {
        self.node_sub[node] == TOUCH_FLUID | TOUCH_SOLID
    }

    pub fn interface_nodes(&self) -> Vec<usize> {
        (0..self.n_support()).filter(|&n| self.is_interface_node(n)).collect()
    }

    pub fn u_dof(&self, node: usize, comp: usize) -> usize {
        node * 2 * self.dim + comp
    }

    pub fn v_dof(&self, node: usize, comp: usize) -> usize {
        node * 2 * self.dim + self.dim + comp
    }

    pub fn field(&self, dof: usize) -> Field {
        if dof >= self.n_nodal_dofs() {
            return Field::Pressure;
        }
        let r = dof % (2 * self.dim);
        if r < self.dim {
            Field::Displacement(r)
        } else {
            Field::Velocity(r - self.dim)
        }
    }

    pub fn node_of(&self, dof: usize) -> Option<usize> {
        (dof < self.n_nodal_dofs()).then(|| dof / (2 * self.dim))
    }

    pub fn cell_nodes(&self, cell: usize) -> &[usize] {
        &self.cell_nodes[cell]
    }

    pub fn fluid_index(&self, cell: usize) -> Option<usize> {
        self.fluid_index[cell]
    }

    pub fn pressure_dofs(&self, cell: usize) -> Option<std::ops::Range<usize>> {
        let np = self.pressure_element().n_dofs();
        self.fluid_index[cell].map(|f| {
            let start = self.n_nodal_dofs() + f * np;
            start..start + np
        })
    }

    /// Global dofs of a cell in local order: displacement components, velocity
    /// components (each component over all local nodes), then pressure.
    pub fn cell_dofs(&self, cell: usize) -> Vec<usize> {
        let nodes = &self.cell_nodes[cell];
        let mut out = Vec::with_capacity(2 * self.dim * nodes.len() + 4);
        for field in 0..2 {
            for a in 0..self.dim {
                out.extend(nodes.iter().map(|&n| n * 2 * self.dim + field * self.dim + a));
            }
        }
        if let Some(r) = self.pressure_dofs(cell) {
            out.extend(r);
        }
        out
    }

    pub fn constraint(&self, dof: usize) -> Option<DirichletKind> {
        self.constraints[dof]
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constraints[dof].is_some()
    }

    pub fn constrained_dofs(&self) -> impl Iterator<Item = (usize, DirichletKind)> + '_ {
        self.constraints.iter().enumerate().filter_map(|(d, c)| c.map(|k| (d, k)))
    }

    pub fn block_class(&self, dof: usize) -> BlockClass {
        self.class[dof]
    }

    /// Global dofs of one block in block-local order.
    ///
    /// The solid block lists all displacement dofs first and the velocity dofs
    /// of the same nodes and components in the same order after them. The
    /// fluid block lists velocities before pressures.
    pub fn block_dofs(&self, b: BlockClass) -> &[usize] {
        &self.block_dofs[b.index()]
    }

    pub fn block_position(&self, dof: usize) -> usize {
        self.block_pos[dof]
    }

    pub fn block_layout(&self) -> crate::linalg::BlockLayout {
        crate::linalg::BlockLayout::new(self.block_dofs.clone(), self.fluid_velocity_count())
    }

    /// Number of velocity dofs at the front of the fluid block.
    pub fn fluid_velocity_count(&self) -> usize {
        self.block_dofs[2].len() - self.n_pressure_dofs()
    }
}

fn set_constraint(slot: &mut Option<DirichletKind>, kind: DirichletKind) {
    *slot = match (*slot, kind) {
        (Some(DirichletKind::Zero), _) | (_, DirichletKind::Zero) => Some(DirichletKind::Zero),
        (_, k) => Some(k),
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_fsi2_mesh, unit_square_mesh};

    #[test]
    fn single_fluid_cell_q1p0() {
        let m = unit_square_mesh();
        let d = distribute_dofs_single_domain(&m, ElementPair::new(1, 2)).unwrap();
        assert_eq!(d.n_dofs(), 2 * (4 * 2) + 1);
        assert!(distribute_dofs(&m, ElementPair::new(1, 2)).is_err());
    }

    #[test]
    fn interface_dofs_are_solid_block() {
        let m = build_fsi2_mesh(0).unwrap();
        let d = distribute_dofs(&m, ElementPair::new(1, 2)).unwrap();
        let iface = d.interface_nodes();
        assert!(!iface.is_empty());
        for n in iface {
            for a in 0..2 {
                assert_eq!(d.block_class(d.u_dof(n, a)), BlockClass::Solid);
                assert_eq!(d.block_class(d.v_dof(n, a)), BlockClass::Solid);
            }
        }
    }

    #[test]
    fn blocks_partition_dofs() {
        let m = build_fsi2_mesh(0).unwrap();
        for k in [1, 2] {
            let d = distribute_dofs(&m, ElementPair::new(k, 2)).unwrap();
            let total: usize = BlockClass::ALL.iter().map(|&b| d.block_dofs(b).len()).sum();
            assert_eq!(total, d.n_dofs());
            for dof in 0..d.n_dofs() {
                let b = d.block_class(dof);
                assert_eq!(d.block_dofs(b)[d.block_position(dof)], dof);
            }
        }
    }

    #[test]
    fn solid_block_pairs_u_and_v() {
        let m = build_fsi2_mesh(0).unwrap();
        let d = distribute_dofs(&m, ElementPair::new(2, 2)).unwrap();
        let s = d.block_dofs(BlockClass::Solid);
        let h = s.len() / 2;
        for i in 0..h {
            assert!(matches!(d.field(s[i]), Field::Displacement(_)));
            assert_eq!(s[i + h], s[i] + 2);
        }
    }

    #[test]
    fn q2_support_nodes_count() {
        let m = build_fsi2_mesh(0).unwrap();
        let d = distribute_dofs(&m, ElementPair::new(2, 2)).unwrap();
        let adj = m.facet_adjacency();
        assert_eq!(d.n_support(), m.n_nodes() + adj.facets.len() + m.n_cells());
    }
}
