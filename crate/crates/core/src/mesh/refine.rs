use std::collections::{BTreeMap, HashMap};

use super::{facet_key, BoundaryTag, FacetKey, Mesh};
use crate::error::{Error, Result};
use crate::tensor::Vec3;

/// Splits every cell into `2^d` children.
///
/// New nodes sit at the average of the parent entity's vertices. Nodes on
/// Obstacle or SolidBase facets are projected onto the mesh's circle when one
/// is attached. Subdomains and facet tags are inherited.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let dim = mesh.dim();
    let children = 1usize << dim;
    let n_new = mesh.n_cells() * children;
    if n_new > super::MAX_CELLS {
        return Err(Error::RefineLimit {
            level: 1,
            max: 0,
        });
    }
    let n_grid = 3usize.pow(dim as u32);
    let mut nodes: Vec<Vec3> = mesh.nodes().to_vec();
    let mut created: HashMap<Vec<usize>, usize> = HashMap::new();
    let snap_facets: Vec<FacetKey> = mesh
        .facet_tags()
        .iter()
        .filter(|(_, t)| matches!(t, BoundaryTag::Obstacle | BoundaryTag::SolidBase))
        .map(|(k, _)| *k)
        .collect();

    let mut cells = Vec::with_capacity(n_new);
    let mut subs = Vec::with_capacity(n_new);
    for c in 0..mesh.n_cells() {
        let verts = mesh.cell_vertices(c);
        let mut grid = vec![0usize; n_grid];
        for (g, slot) in grid.iter_mut().enumerate() {
            let m = grid_index(dim, g);
            let mut ent: Vec<usize> = (0..children)
                .filter(|&b| (0..dim).all(|a| m[a] == 1 || ((b >> a) & 1) * 2 == m[a]))
                .map(|b| verts[b])
                .collect();
            if ent.len() == 1 {
                *slot = ent[0];
                continue;
            }
            ent.sort_unstable();
            *slot = *created.entry(ent.clone()).or_insert_with(|| {
                let n = ent.len() as f64;
                let mut p = [0.0; 3];
                for &v in &ent {
                    for k in 0..3 {
                        p[k] += mesh.node(v)[k] / n;
                    }
                }
                if let Some(circle) = mesh.obstacle() {
                    if ent.len() <= 4 && snap_facets.iter().any(|key| ent.iter().all(|v| key.contains(v))) {
                        p = circle.project(&p);
                    }
                }
                nodes.push(p);
                nodes.len() - 1
            });
        }
        for child in 0..children {
            let cv: Vec<usize> = (0..children)
                .map(|b| {
                    let mut g = 0;
                    let mut stride = 1;
                    for a in 0..dim {
                        g += (((child >> a) & 1) + ((b >> a) & 1)) * stride;
                        stride *= 3;
                    }
                    grid[g]
                })
                .collect();
            cells.push(cv);
            subs.push(mesh.subdomain(c));
        }
    }

    let mut tags = BTreeMap::new();
    for c in 0..mesh.n_cells() {
        for f in 0..mesh.facets_per_cell() {
            let Some(tag) = mesh.facet_tag(&mesh.cell_facet_key(c, f)) else {
                continue;
            };
            let (axis, side) = (f / 2, f % 2);
            for child in 0..children {
                if (child >> axis) & 1 != side {
                    continue;
                }
                let cv = &cells[c * children + child];
                let verts: Vec<usize> = Mesh::local_facet_vertices(dim, f).iter().map(|&b| cv[b]).collect();
                tags.insert(facet_key(&verts), tag);
            }
        }
    }
    let out = Mesh::from_parts(dim, nodes, cells, subs, tags, mesh.obstacle().copied())?;
    out.validate()?;
    Ok(out)
}

fn grid_index(dim: usize, mut g: usize) -> [usize; 3] {
    let mut m = [0; 3];
    for slot in m.iter_mut().take(dim) {
        *slot = g % 3;
        g /= 3;
    }
    m
}
