use fsi_core::fem::QuadratureRule;
use fsi_core::mesh::{build_box3d_mesh, build_fsi2_mesh, refine_uniform, Box3dGeometry, Fsi2Geometry, Mesh, Subdomain};
use proptest::prelude::*;

fn on_fsi2_boundary(p: &[f64; 3]) -> bool {
    let tol = 1e-9;
    let [cx, cy] = Fsi2Geometry::CENTER;
    let r = ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
    p[0].abs() < tol
        || (p[0] - Fsi2Geometry::LENGTH).abs() < tol
        || p[1].abs() < tol
        || (p[1] - Fsi2Geometry::HEIGHT).abs() < tol
        || (r - Fsi2Geometry::RADIUS).abs() < 1e-6
}

fn on_box_boundary(p: &[f64; 3]) -> bool {
    let tol = 1e-9;
    p[0].abs() < tol
        || (p[0] - Box3dGeometry::LENGTH).abs() < tol
        || p[1].abs() < tol
        || (p[1] - Box3dGeometry::HEIGHT).abs() < tol
        || (p[2].abs() - Box3dGeometry::HALF_WIDTH).abs() < tol
}

/// Every facet is shared by at most two cells and every facet seen by only
/// one cell lies on the outer boundary, so no hanging nodes exist.
fn assert_conforming(mesh: &Mesh, on_boundary: impl Fn(&[f64; 3]) -> bool) {
    let adj = mesh.facet_adjacency();
    for (key, refs) in &adj.facets {
        assert!(refs.len() <= 2, "facet {key:?} shared by {} cells", refs.len());
        if refs.len() == 1 {
            let verts = mesh.facet_vertices(refs[0].cell, refs[0].local);
            let all_out = verts.iter().all(|&v| on_boundary(mesh.node(v)));
            assert!(all_out, "interior facet {key:?} has a single neighbor");
        }
    }
}

fn assert_oriented(mesh: &Mesh) {
    let rule = QuadratureRule::gauss(mesh.dim(), 3);
    for c in 0..mesh.n_cells() {
        for p in &rule.points {
            assert!(mesh.map_jacobian(c, p).det() > 0.0, "cell {c} inverted at {p:?}");
        }
    }
}

fn assert_subdomain_partition(mesh: &Mesh) {
    let fluid: Vec<usize> = mesh.cells_in(Subdomain::Fluid).collect();
    let solid: Vec<usize> = mesh.cells_in(Subdomain::Solid).collect();
    assert_eq!(fluid.len() + solid.len(), mesh.n_cells());
    assert!(fluid.iter().all(|c| !solid.contains(c)));
    assert!(!fluid.is_empty() && !solid.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn fsi2_levels_are_valid(level in 0usize..=2) {
        let mesh = build_fsi2_mesh(level).unwrap();
        assert_subdomain_partition(&mesh);
        assert_conforming(&mesh, on_fsi2_boundary);
        assert_oriented(&mesh);
        mesh.validate().unwrap();
    }
}

#[test]
fn box3d_levels_are_valid() {
    for level in 0..=1 {
        let mesh = build_box3d_mesh(level).unwrap();
        assert_subdomain_partition(&mesh);
        assert_conforming(&mesh, on_box_boundary);
        assert_oriented(&mesh);
    }
}

#[test]
fn refinement_quadruples_cells_and_converges_area() {
    let m0 = build_fsi2_mesh(0).unwrap();
    let m1 = refine_uniform(&m0).unwrap();
    assert_eq!(m1.n_cells(), 4 * m0.n_cells());
    let solid0 = m0.subdomain_measure(Subdomain::Solid);
    let solid1 = m1.subdomain_measure(Subdomain::Solid);
    // The beam base follows the circle, so only the straight part is exact.
    assert!((solid0 - solid1).abs() < 5e-3 * solid0);
    assert!((solid1 - 0.35 * 0.02).abs() < 1e-2 * solid1);
    let disk = std::f64::consts::PI * Fsi2Geometry::RADIUS.powi(2);
    let total = Fsi2Geometry::LENGTH * Fsi2Geometry::HEIGHT - disk;
    let err = |m: &Mesh| (m.subdomain_measure(Subdomain::Fluid) + m.subdomain_measure(Subdomain::Solid) - total).abs();
    let m2 = refine_uniform(&m1).unwrap();
    assert!(err(&m1) < err(&m0) && err(&m2) < err(&m1));
}
