//! Built-in coarse meshes for the two benchmark configurations.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use super::{facet_key, refine_uniform, BoundaryTag, Circle, FacetKey, Mesh, Subdomain};
use crate::error::{Error, Result};
use crate::tensor::Vec3;

/// Upper bound on the number of cells a generator will produce.
pub const MAX_CELLS: usize = 2_000_000;

/// Geometry of the 2D channel with cylinder and elastic beam.
#[derive(Debug, Clone, Copy)]
pub struct Fsi2Geometry;

impl Fsi2Geometry {
    pub const LENGTH: f64 = 2.5;
    pub const HEIGHT: f64 = 0.41;
    pub const CENTER: [f64; 2] = [0.2, 0.2];
    pub const RADIUS: f64 = 0.05;
    pub const BEAM_TIP: f64 = 0.6;
    pub const BEAM_HALF_THICKNESS: f64 = 0.01;
    pub const REFERENCE_POINT: Vec3 = [0.6, 0.2, 0.0];

    /// x-coordinate where the beam meets the cylinder.
    pub fn attachment_x() -> f64 {
        Self::CENTER[0] + (Self::RADIUS.powi(2) - Self::BEAM_HALF_THICKNESS.powi(2)).sqrt()
    }

    pub fn circle() -> Circle {
        Circle {
            center: [Self::CENTER[0], Self::CENTER[1], 0.0],
            radius: Self::RADIUS,
        }
    }
}

/// Geometry of the 3D channel with a box-shaped elastic obstacle.
#[derive(Debug, Clone, Copy)]
pub struct Box3dGeometry;

impl Box3dGeometry {
    pub const LENGTH: f64 = 1.5;
    pub const HEIGHT: f64 = 0.4;
    pub const HALF_WIDTH: f64 = 0.4;
    pub const SOLID_MIN: Vec3 = [0.4, 0.0, -0.2];
    pub const SOLID_MAX: Vec3 = [0.5, 0.3, 0.2];

    /// Displacement evaluation points P1..P4 on the obstacle top.
    pub const EVAL_POINTS: [Vec3; 4] = [[0.4, 0.3, 0.0], [0.4, 0.3, -0.2], [0.5, 0.3, -0.2], [0.5, 0.3, 0.0]];
}

struct Builder {
    dim: usize,
    nodes: Vec<Vec3>,
    lookup: HashMap<[i64; 3], usize>,
    cells: Vec<Vec<usize>>,
    subdomains: Vec<Subdomain>,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder {
            dim,
            nodes: Vec::new(),
            lookup: HashMap::new(),
            cells: Vec::new(),
            subdomains: Vec::new(),
        }
    }

    fn node(&mut self, p: Vec3) -> usize {
        let key = [
            (p[0] * 1e9).round() as i64,
            (p[1] * 1e9).round() as i64,
            (p[2] * 1e9).round() as i64,
        ];
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        self.nodes.push(p);
        self.lookup.insert(key, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn cell(&mut self, pts: &[Vec3], sub: Subdomain) {
        let ids = pts.iter().map(|p| self.node(*p)).collect();
        self.cells.push(ids);
        self.subdomains.push(sub);
    }

    /// Quads between consecutive vertical lines, each given as a list of points.
    fn strip(&mut self, lines: &[Vec<Vec3>], solid: impl Fn(&Vec3) -> bool) {
        for w in lines.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            for j in 0..a.len() - 1 {
                let pts = [a[j], b[j], a[j + 1], b[j + 1]];
                let c = centroid(&pts);
                let sub = if solid(&c) { Subdomain::Solid } else { Subdomain::Fluid };
                self.cell(&pts, sub);
            }
        }
    }

    fn finish(
        self,
        obstacle: Option<Circle>,
        classify: impl Fn(&[Vec3], Subdomain) -> Option<BoundaryTag>,
    ) -> Result<Mesh> {
        let mut mesh = Mesh::from_parts(self.dim, self.nodes, self.cells, self.subdomains, BTreeMap::new(), obstacle)?;
        let adj = mesh.facet_adjacency();
        let mut tags: BTreeMap<FacetKey, BoundaryTag> = BTreeMap::new();
        for (key, refs) in &adj.facets {
            if refs.len() != 1 {
                continue;
            }
            let r = refs[0];
            let pts: Vec<Vec3> = mesh.facet_vertices(r.cell, r.local).iter().map(|&v| *mesh.node(v)).collect();
            let tag = classify(&pts, mesh.subdomain(r.cell)).ok_or_else(|| {
                Error::InvalidMesh(format!("boundary facet of cell {} matches no boundary part", r.cell))
            })?;
            tags.insert(*key, tag);
        }
        mesh.facet_tags = tags;
        mesh.validate()?;
        Ok(mesh)
    }
}

fn centroid(pts: &[Vec3]) -> Vec3 {
    let n = pts.len() as f64;
    let mut c = [0.0; 3];
    for p in pts {
        for k in 0..3 {
            c[k] += p[k] / n;
        }
    }
    c
}

fn all_near(pts: &[Vec3], axis: usize, value: f64) -> bool {
    pts.iter().all(|p| (p[axis] - value).abs() < 1e-9)
}

fn check_level(level: usize, base_cells: usize, children: usize) -> Result<()> {
    let mut max = 0;
    let mut n = base_cells;
    while n * children <= MAX_CELLS {
        n *= children;
        max += 1;
    }
    if level > max {
        return Err(Error::RefineLimit { level, max });
    }
    Ok(())
}

fn refine_times(mut mesh: Mesh, level: usize) -> Result<Mesh> {
    for _ in 0..level {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

/// 2D channel `[0, 2.5] × [0, 0.41]` around a cylinder with an attached beam.
///
/// Level 0 has 52 quadrilaterals, 3 of them in the beam. The cylinder is
/// resolved by 9 boundary facets and re-snapped on every refinement.
pub fn build_fsi2_mesh(refine_level: usize) -> Result<Mesh> {
    const BASE: usize = 52;
    check_level(refine_level, BASE, 4)?;
    let circle = Fsi2Geometry::circle();
    let (cx, cy, r) = (Fsi2Geometry::CENTER[0], Fsi2Geometry::CENTER[1], Fsi2Geometry::RADIUS);
    let t = Fsi2Geometry::BEAM_HALF_THICKNESS;
    let (y_lo, y_hi) = (cy - t, cy + t);
    let x_tip = Fsi2Geometry::BEAM_TIP;

    let alpha = (t / r).asin();
    let mut angles = vec![alpha];
    angles.extend((1..8).map(|k| k as f64 * PI / 4.0));
    angles.push(2.0 * PI - alpha);
    let circ: Vec<Vec3> = angles
        .iter()
        .map(|a| [cx + r * a.cos(), cy + r * a.sin(), 0.0])
        .collect();
    let boxp: [Vec3; 9] = [
        [0.3, y_hi, 0.0],
        [0.3, 0.3, 0.0],
        [0.2, 0.3, 0.0],
        [0.1, 0.3, 0.0],
        [0.1, 0.2, 0.0],
        [0.1, 0.1, 0.0],
        [0.2, 0.1, 0.0],
        [0.3, 0.1, 0.0],
        [0.3, y_lo, 0.0],
    ];

    let mut b = Builder::new(2);
    for i in 0..8 {
        b.cell(&[circ[i], boxp[i], circ[i + 1], boxp[i + 1]], Subdomain::Fluid);
    }
    b.cell(&[circ[8], boxp[8], circ[0], boxp[0]], Subdomain::Solid);

    let h = Fsi2Geometry::HEIGHT;
    let col = |x: f64, ys: &[f64]| ys.iter().map(|&y| [x, y, 0.0]).collect::<Vec<_>>();
    let fluid_only = |_: &Vec3| false;
    b.strip(&[col(0.0, &[0.0, 0.1, 0.2, 0.3, h]), col(0.1, &[0.0, 0.1, 0.2, 0.3, h])], fluid_only);
    b.strip(&[col(0.1, &[0.0, 0.1]), col(0.2, &[0.0, 0.1]), col(0.3, &[0.0, 0.1])], fluid_only);
    b.strip(&[col(0.1, &[0.3, h]), col(0.2, &[0.3, h]), col(0.3, &[0.3, h])], fluid_only);
    let near = [0.0, 0.1, y_lo, y_hi, 0.3, h];
    let in_beam = |c: &Vec3| c[0] < x_tip && c[1] > y_lo && c[1] < y_hi;
    b.strip(&[col(0.3, &near), col(0.45, &near), col(x_tip, &near)], in_beam);
    let far: Vec<f64> = (0..=5).map(|j| h * j as f64 / 5.0).collect();
    let mut lines = vec![col(x_tip, &near)];
    for x in [0.8, 1.1, 1.5, 2.0, Fsi2Geometry::LENGTH] {
        lines.push(col(x, &far));
    }
    b.strip(&lines, fluid_only);

    let mesh = b.finish(Some(circle), |pts, sub| {
        if all_near(pts, 0, 0.0) {
            Some(BoundaryTag::Inflow)
        } else if all_near(pts, 0, Fsi2Geometry::LENGTH) {
            Some(BoundaryTag::Outflow)
        } else if all_near(pts, 1, 0.0) {
            Some(BoundaryTag::Bottom)
        } else if all_near(pts, 1, h) {
            Some(BoundaryTag::Top)
        } else if pts.iter().all(|p| circle.contains_on_boundary(p, 1e-9)) {
            Some(match sub {
                Subdomain::Fluid => BoundaryTag::Obstacle,
                Subdomain::Solid => BoundaryTag::SolidBase,
            })
        } else {
            None
        }
    })?;
    debug_assert_eq!(mesh.n_cells(), BASE);
    refine_times(mesh, refine_level)
}

/// 3D channel `(0, 1.5) × (0, 0.4) × (−0.4, 0.4)` with a solid block on the floor.
///
/// Level 0 is a tensor grid of 72 hexahedra, 4 of them solid.
pub fn build_box3d_mesh(refine_level: usize) -> Result<Mesh> {
    const BASE: usize = 72;
    check_level(refine_level, BASE, 8)?;
    let xs = [0.0, 0.2, 0.4, 0.5, 0.75, 1.1, Box3dGeometry::LENGTH];
    let ys = [0.0, 0.15, 0.3, Box3dGeometry::HEIGHT];
    let zs = [-0.4, -0.2, 0.0, 0.2, 0.4];
    let (lo, hi) = (Box3dGeometry::SOLID_MIN, Box3dGeometry::SOLID_MAX);
    let mut b = Builder::new(3);
    for k in 0..zs.len() - 1 {
        for j in 0..ys.len() - 1 {
            for i in 0..xs.len() - 1 {
                let pts: Vec<Vec3> = (0..8)
                    .map(|v| [xs[i + (v & 1)], ys[j + ((v >> 1) & 1)], zs[k + ((v >> 2) & 1)]])
                    .collect();
                let c = centroid(&pts);
                let solid = (0..3).all(|a| c[a] > lo[a] && c[a] < hi[a]);
                b.cell(&pts, if solid { Subdomain::Solid } else { Subdomain::Fluid });
            }
        }
    }
    let mesh = b.finish(None, |pts, sub| {
        if all_near(pts, 0, 0.0) {
            Some(BoundaryTag::Inflow)
        } else if all_near(pts, 0, Box3dGeometry::LENGTH) {
            Some(BoundaryTag::Outflow)
        } else if all_near(pts, 1, 0.0) {
            Some(match sub {
                Subdomain::Fluid => BoundaryTag::Bottom,
                Subdomain::Solid => BoundaryTag::SolidBase,
            })
        } else if all_near(pts, 1, Box3dGeometry::HEIGHT) {
            Some(BoundaryTag::Top)
        } else if all_near(pts, 2, -Box3dGeometry::HALF_WIDTH) || all_near(pts, 2, Box3dGeometry::HALF_WIDTH) {
            Some(BoundaryTag::Side)
        } else {
            None
        }
    })?;
    debug_assert_eq!(mesh.n_cells(), BASE);
    refine_times(mesh, refine_level)
}

/// The unit square as one Fluid cell; left facet inflow, right outflow.
pub fn unit_square_mesh() -> Mesh {
    single_cell_mesh(2, Subdomain::Fluid)
}

/// One unit cell of the given dimension and subdomain.
///
/// The `x = 0` facet is tagged Inflow, `x = 1` Outflow, `y = 0` Bottom,
/// `y = 1` Top and the `z` facets Side.
pub fn single_cell_mesh(dim: usize, sub: Subdomain) -> Mesh {
    let nv = 1usize << dim;
    let nodes: Vec<Vec3> = (0..nv)
        .map(|b| [(b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64])
        .collect();
    let cell: Vec<usize> = (0..nv).collect();
    let mut tags = BTreeMap::new();
    let names = [
        BoundaryTag::Inflow,
        BoundaryTag::Outflow,
        BoundaryTag::Bottom,
        BoundaryTag::Top,
        BoundaryTag::Side,
        BoundaryTag::Side,
    ];
    for (f, tag) in names.iter().enumerate().take(2 * dim) {
        let verts = Mesh::local_facet_vertices(dim, f);
        tags.insert(facet_key(&verts), *tag);
    }
    Mesh::from_parts(dim, nodes, vec![cell], vec![sub], tags, None).expect("unit cell is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fsi2_level0_structure() {
        let m = build_fsi2_mesh(0).unwrap();
        assert_eq!(m.n_cells(), 52);
        assert_eq!(m.cells_in(Subdomain::Solid).count(), 3);
        for c in m.cells_in(Subdomain::Solid) {
            let x = m.cell_center(c);
            assert!(x[0] > 0.24 && x[0] < 0.6 && (x[1] - 0.2).abs() < 0.01);
        }
    }

    #[test]
    fn reference_point_on_solid_facet() {
        let m = build_fsi2_mesh(0).unwrap();
        let p = Fsi2Geometry::REFERENCE_POINT;
        let on_facet = m.cells_in(Subdomain::Solid).any(|c| {
            (0..4).any(|f| {
                let v = m.facet_vertices(c, f);
                let (a, b) = (m.node(v[0]), m.node(v[1]));
                let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]))
                    / ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2));
                cross.abs() < 1e-14 && (0.0..=1.0).contains(&t)
            })
        });
        assert!(on_facet);
        let m1 = build_fsi2_mesh(1).unwrap();
        assert!(m1.nodes().iter().any(|q| (q[0] - p[0]).abs() < 1e-14 && (q[1] - p[1]).abs() < 1e-14));
    }

    #[test]
    fn fsi2_area_matches_polygon() {
        let m = build_fsi2_mesh(0).unwrap();
        let circle = Fsi2Geometry::circle();
        // Shoelace area of the cylinder polygon.
        let mut ring: Vec<Vec3> = Vec::new();
        let mut segs = Vec::new();
        for (key, tag) in m.facet_tags() {
            if matches!(tag, BoundaryTag::Obstacle | BoundaryTag::SolidBase) {
                segs.push((key[0], key[1]));
            }
        }
        assert_eq!(segs.len(), 9);
        let mut pts: Vec<(f64, usize)> = segs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .map(|v| {
                let p = m.node(v);
                ((p[1] - circle.center[1]).atan2(p[0] - circle.center[0]), v)
            })
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pts.dedup_by_key(|p| p.1);
        for (_, v) in &pts {
            ring.push(*m.node(*v));
        }
        let n = ring.len();
        let poly: f64 = (0..n)
            .map(|i| {
                let (a, b) = (ring[i], ring[(i + 1) % n]);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum::<f64>()
            / 2.0;
        let total = m.subdomain_measure(Subdomain::Fluid) + m.subdomain_measure(Subdomain::Solid);
        assert!((total - (2.5 * 0.41 - poly)).abs() < 1e-12, "{total} vs {}", 2.5 * 0.41 - poly);
    }

    #[test]
    fn box3d_level0() {
        let m = build_box3d_mesh(0).unwrap();
        assert_eq!(m.n_cells(), 72);
        assert!((m.subdomain_measure(Subdomain::Solid) - 0.012).abs() < 1e-12);
        let key = |p: &Vec3| [(p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64, (p[2] * 1e9).round() as i64];
        let set: std::collections::HashSet<_> = m.nodes().iter().map(key).collect();
        for p in m.nodes() {
            assert!(set.contains(&key(&[p[0], p[1], -p[2]])));
        }
    }

    #[test]
    fn level_guard() {
        assert!(matches!(build_fsi2_mesh(40), Err(Error::RefineLimit { .. })));
        assert!(matches!(build_box3d_mesh(9), Err(Error::RefineLimit { .. })));
    }
}
