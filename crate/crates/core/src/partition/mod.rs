//! Mesh partitioning, ghost layers, dof ownership and load-balance metrics.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fem::DofMap;
use crate::mesh::{Mesh, Subdomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionStrategy {
    /// Every rank owns a piece of the fluid and a piece of the solid.
    Shared,
    /// Ranks own either fluid or solid cells.
    Split,
    /// Bisection over all cells, ignoring subdomains.
    Default,
}

impl PartitionStrategy {
    pub fn name(self) -> &'static str {
        match self {
            PartitionStrategy::Shared => "shared",
            PartitionStrategy::Split => "split",
            PartitionStrategy::Default => "default",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "shared" => Some(PartitionStrategy::Shared),
            "split" => Some(PartitionStrategy::Split),
            "default" => Some(PartitionStrategy::Default),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub owner: Vec<usize>,
    pub n_parts: usize,
    pub strategy: PartitionStrategy,
    pub ghosts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn owned_cells(&self, rank: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&c| self.owner[c] == rank).collect()
    }
}

/// Ownership of dofs: a dof shared by several ranks belongs to the lowest.
#[derive(Debug, Clone, PartialEq)]
pub struct DofOwnership {
    pub owner: Vec<usize>,
    pub owned: Vec<Vec<usize>>,
    /// Dofs of owned and ghost cells.
    pub relevant: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceReport {
    pub dofs_per_rank: Vec<usize>,
    /// Largest over mean rank dof count.
    pub ratio: f64,
    /// Facets whose two cells have different owners.
    pub cut_facets: usize,
}

/// Recursive coordinate bisection of `cells` into `parts` pieces, written
/// to `owner` starting at rank `first`.
fn bisect(mesh: &Mesh, cells: &mut [usize], parts: usize, first: usize, owner: &mut [usize]) {
    if parts == 1 {
        for &c in cells.iter() {
            owner[c] = first;
        }
        return;
    }
    let centers: Vec<_> = cells.iter().map(|&c| mesh.cell_center(c)).collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &centers {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let axis = (0..mesh.dim())
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&i, &j| centers[i][axis].total_cmp(&centers[j][axis]).then(cells[i].cmp(&cells[j])));
    let sorted: Vec<usize> = order.iter().map(|&i| cells[i]).collect();
    cells.copy_from_slice(&sorted);
    let left = parts / 2;
    let split = (cells.len() * left + parts / 2) / parts;
    let (a, b) = cells.split_at_mut(split);
    bisect(mesh, a, left, first, owner);
    bisect(mesh, b, parts - left, first + left, owner);
}

pub fn partition_mesh(mesh: &Mesh, n_parts: usize, strategy: PartitionStrategy) -> Result<Partition> {
    if n_parts == 0 {
        return Err(Error::Config("number of partitions must be at least 1".into()));
    }
    let mut owner = vec![0; mesh.n_cells()];
    let mut fluid: Vec<usize> = mesh.cells_in(Subdomain::Fluid).collect();
    let mut solid: Vec<usize> = mesh.cells_in(Subdomain::Solid).collect();
    let too_many = |what: &str, n: usize| {
        Error::Config(format!("{n_parts} partitions exceed the {n} {what} cells"))
    };
    if n_parts > 1 {
        match strategy {
            PartitionStrategy::Default => {
                if n_parts > mesh.n_cells() {
                    return Err(too_many("mesh", mesh.n_cells()));
                }
                let mut all: Vec<usize> = (0..mesh.n_cells()).collect();
                bisect(mesh, &mut all, n_parts, 0, &mut owner);
            }
            PartitionStrategy::Shared => {
                if n_parts > fluid.len() {
                    return Err(too_many("fluid", fluid.len()));
                }
                if n_parts > solid.len() {
                    return Err(too_many("solid", solid.len()));
                }
                bisect(mesh, &mut fluid, n_parts, 0, &mut owner);
                bisect(mesh, &mut solid, n_parts, 0, &mut owner);
            }
            PartitionStrategy::Split => {
                let total = mesh.n_cells() as f64;
                let n_solid = ((n_parts as f64 * solid.len() as f64 / total).round() as usize).clamp(1, n_parts - 1);
                let n_fluid = n_parts - n_solid;
                if n_fluid > fluid.len() {
                    return Err(too_many("fluid", fluid.len()));
                }
                if n_solid > solid.len() {
                    return Err(too_many("solid", solid.len()));
                }
                bisect(mesh, &mut fluid, n_fluid, 0, &mut owner);
                bisect(mesh, &mut solid, n_solid, n_fluid, &mut owner);
            }
        }
    }
    let mut p = Partition {
        owner,
        n_parts,
        strategy,
        ghosts: Vec::new(),
    };
    p.ghosts = ghost_layer(mesh, &p);
    Ok(p)
}

/// Non-owned cells sharing at least one vertex with an owned cell, per rank.
pub fn ghost_layer(mesh: &Mesh, partition: &Partition) -> Vec<Vec<usize>> {
    let mut node_cells = vec![Vec::new(); mesh.n_nodes()];
    for c in 0..mesh.n_cells() {
        for &v in mesh.cell_vertices(c) {
            node_cells[v].push(c);
        }
    }
    let mut ghosts = vec![BTreeSet::new(); partition.n_parts];
    for c in 0..mesh.n_cells() {
        let rank = partition.owner[c];
        for &v in mesh.cell_vertices(c) {
            for &o in &node_cells[v] {
                if partition.owner[o] != rank {
                    ghosts[rank].insert(o);
                }
            }
        }
    }
    ghosts.into_iter().map(|s| s.into_iter().collect()).collect()
}

pub fn dof_ownership(partition: &Partition, dofmap: &DofMap) -> DofOwnership {
    let n = dofmap.n_dofs();
    let mut owner = vec![usize::MAX; n];
    for (c, &rank) in partition.owner.iter().enumerate() {
        for d in dofmap.cell_dofs(c) {
            owner[d] = owner[d].min(rank);
        }
    }
    let mut owned = vec![Vec::new(); partition.n_parts];
    for (d, &r) in owner.iter().enumerate() {
        owned[r].push(d);
    }
    let relevant = (0..partition.n_parts)
        .map(|rank| {
            let mut set = BTreeSet::new();
            let cells = partition.owned_cells(rank);
            for &c in cells.iter().chain(&partition.ghosts[rank]) {
                set.extend(dofmap.cell_dofs(c));
            }
            set.into_iter().collect()
        })
        .collect();
    DofOwnership { owner, owned, relevant }
}

pub fn imbalance(mesh: &Mesh, partition: &Partition, dofmap: &DofMap) -> ImbalanceReport {
    let own = dof_ownership(partition, dofmap);
    let dofs_per_rank: Vec<usize> = own.owned.iter().map(Vec::len).collect();
    let mean = dofs_per_rank.iter().sum::<usize>() as f64 / partition.n_parts as f64;
    let max = dofs_per_rank.iter().copied().max().unwrap_or(0) as f64;
    let adj = mesh.facet_adjacency();
    let cut_facets = adj
        .facets
        .values()
        .filter(|refs| refs.len() == 2 && partition.owner[refs[0].cell] != partition.owner[refs[1].cell])
        .count();
    ImbalanceReport {
        dofs_per_rank,
        ratio: if mean > 0.0 { max / mean } else { 1.0 },
        cut_facets,
    }
}
