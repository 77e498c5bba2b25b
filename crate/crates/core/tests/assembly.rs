use fsi_core::fem::{distribute_dofs, distribute_dofs_single_domain, ElementPair, Field};
use fsi_core::linalg::norm_inf;
use fsi_core::mesh::{build_box3d_mesh, build_fsi2_mesh, single_cell_mesh, Subdomain};
use fsi_core::physics::{Assembler, MaterialParams, StepParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(dofmap: &fsi_core::fem::DofMap, rng: &mut ChaCha8Rng, su: f64, sv: f64, sp: f64) -> Vec<f64> {
    (0..dofmap.n_dofs())
        .map(|i| {
            let s = match dofmap.field(i) {
                Field::Displacement(_) => su,
                Field::Velocity(_) => sv,
                Field::Pressure => sp,
            };
            s * rng.random_range(-1.0..1.0)
        })
        .collect()
}

fn fd_error(asm: &Assembler, x: &[f64], xo: &[f64], dir: &[f64], step: StepParams, h: f64) -> f64 {
    let (a, _) = asm.raw_jacobian(x, xo, step).unwrap();
    let jd = a.mul_vec(dir);
    let xp: Vec<f64> = x.iter().zip(dir).map(|(x, d)| x + h * d).collect();
    let xm: Vec<f64> = x.iter().zip(dir).map(|(x, d)| x - h * d).collect();
    let rp = asm.raw_residual(&xp, xo, step).unwrap();
    let rm = asm.raw_residual(&xm, xo, step).unwrap();
    let diff: Vec<f64> = rp.iter().zip(&rm).zip(&jd).map(|((p, m), j)| (p - m) / (2.0 * h) - j).collect();
    fsi_core::linalg::norm2(&diff) / fsi_core::linalg::norm2(&jd)
}

#[test]
fn jacobian_matches_finite_differences_2d() {
    let mesh = build_fsi2_mesh(0).unwrap();
    let dofmap = distribute_dofs(&mesh, ElementPair::new(2, 2)).unwrap();
    let asm = Assembler::new(&mesh, &dofmap, MaterialParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = StepParams { dt: 0.01, theta: 0.51 };
    for _ in 0..3 {
        let x = random_state(&dofmap, &mut rng, 1e-3, 1.0, 10.0);
        let xo = random_state(&dofmap, &mut rng, 1e-3, 1.0, 10.0);
        let dir = random_state(&dofmap, &mut rng, 1e-3, 1.0, 10.0);
        let err = fd_error(&asm, &x, &xo, &dir, step, 1e-6);
        assert!(err < 1e-5, "relative error {err}");
    }
}

#[test]
fn jacobian_matches_finite_differences_3d() {
    let mesh = build_box3d_mesh(0).unwrap();
    let dofmap = distribute_dofs(&mesh, ElementPair::new(1, 3)).unwrap();
    let asm = Assembler::new(&mesh, &dofmap, MaterialParams::default());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let step = StepParams { dt: 0.02, theta: 0.5 };
    let x = random_state(&dofmap, &mut rng, 1e-3, 1.0, 10.0);
    let xo = random_state(&dofmap, &mut rng, 1e-3, 1.0, 10.0);
    let dir = random_state(&dofmap, &mut rng, 1e-3, 1.0, 10.0);
    let err = fd_error(&asm, &x, &xo, &dir, step, 1e-6);
    assert!(err < 1e-5, "relative error {err}");
}

#[test]
fn rest_state_has_zero_residual() {
    let mesh = build_fsi2_mesh(0).unwrap();
    let dofmap = distribute_dofs(&mesh, ElementPair::new(2, 2)).unwrap();
    let asm = Assembler::new(&mesh, &dofmap, MaterialParams::default());
    let x = vec![0.0; dofmap.n_dofs()];
    let r = asm.residual(&x, &x, StepParams { dt: 0.005, theta: 0.505 }).unwrap();
    assert_eq!(norm_inf(&r), 0.0);
}

#[test]
fn hydrostatic_single_cell() {
    let mesh = single_cell_mesh(2, Subdomain::Fluid);
    let dofmap = distribute_dofs_single_domain(&mesh, ElementPair::new(2, 2)).unwrap();
    let asm = Assembler::new(&mesh, &dofmap, MaterialParams::default());
    let mut x = vec![0.0; dofmap.n_dofs()];
    let p0 = dofmap.pressure_dofs(0).unwrap().start;
    x[p0] = 5.0;
    let r = asm.raw_residual(&x, &x, StepParams { dt: 0.1, theta: 1.0 }).unwrap();
    // Constant pressure: the momentum residual equals the boundary flux of
    // −Δt p n, so interior velocity rows vanish.
    for node in 0..dofmap.n_support() {
        let s = dofmap.support_point(node);
        let interior = s[0] > 0.0 && s[0] < 1.0 && s[1] > 0.0 && s[1] < 1.0;
        if interior {
            for a in 0..2 {
                assert!(r[dofmap.v_dof(node, a)].abs() < 1e-13);
            }
        }
    }
    for p in dofmap.pressure_dofs(0).unwrap() {
        assert_eq!(r[p], 0.0);
    }
    // Edge x = 1 carries −Δt p ∫ φ ds.
    let mut total = 0.0;
    for node in 0..dofmap.n_support() {
        if dofmap.support_point(node)[0] == 1.0 {
            total += r[dofmap.v_dof(node, 0)];
        }
    }
    assert!((total + 0.1 * 5.0).abs() < 1e-13, "{total}");
}

#[test]
fn stokes_block_symmetric_at_rest() {
    let mesh = build_fsi2_mesh(0).unwrap();
    let dofmap = distribute_dofs(&mesh, ElementPair::new(2, 2)).unwrap();
    let asm = Assembler::new(&mesh, &dofmap, MaterialParams::default());
    let x = vec![0.0; dofmap.n_dofs()];
    let (a, _) = asm.raw_jacobian(&x, &x, StepParams { dt: 0.01, theta: 1.0 }).unwrap();
    let outflow_nodes: Vec<bool> = (0..dofmap.n_support())
        .map(|n| (dofmap.support_point(n)[0] - 2.5).abs() < 1e-12)
        .collect();
    let fluid_v: Vec<usize> = (0..dofmap.n_support())
        .filter(|&n| !dofmap.node_touches(n, Subdomain::Solid) && !outflow_nodes[n])
        .flat_map(|n| [dofmap.v_dof(n, 0), dofmap.v_dof(n, 1)])
        .collect();
    let mut asym: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &i in &fluid_v {
        for &j in &fluid_v {
            asym = asym.max((a.get(i, j) - a.get(j, i)).abs());
            scale = scale.max(a.get(i, j).abs());
        }
    }
    assert!(asym <= 1e-12 * scale, "{asym} vs {scale}");
}

#[test]
fn mesh_block_is_harmonic_extension() {
    let mesh = build_fsi2_mesh(0).unwrap();
    let dofmap = distribute_dofs(&mesh, ElementPair::new(2, 2)).unwrap();
    let asm = Assembler::new(&mesh, &dofmap, MaterialParams::default());
    let x = vec![0.0; dofmap.n_dofs()];
    let (a, _) = asm.raw_jacobian(&x, &x, StepParams { dt: 0.01, theta: 0.5 }).unwrap();
    // At rest the mesh rows are the vector Laplacian: constants are in its kernel
    // for rows away from the interface.
    let ones: Vec<f64> = (0..dofmap.n_dofs())
        .map(|i| if matches!(dofmap.field(i), Field::Displacement(0)) { 1.0 } else { 0.0 })
        .collect();
    let y = a.mul_vec(&ones);
    for node in 0..dofmap.n_support() {
        if dofmap.node_touches(node, Subdomain::Solid) {
            continue;
        }
        assert!(y[dofmap.u_dof(node, 0)].abs() < 1e-12);
    }
}

fn lagrange2(node: f64, x: f64) -> (f64, f64) {
    if node == 0.0 {
        (2.0 * (x - 0.5) * (x - 1.0), 4.0 * x - 3.0)
    } else if node == 0.5 {
        (-4.0 * x * (x - 1.0), -8.0 * x + 4.0)
    } else {
        (2.0 * x * (x - 0.5), 4.0 * x - 1.0)
    }
}

/// Eulerian Navier-Stokes residual on the unit square, written out directly.
fn eulerian_residual(
    dofmap: &fsi_core::fem::DofMap,
    params: &MaterialParams,
    x: &[f64],
    xo: &[f64],
    step: StepParams,
) -> Vec<f64> {
    let (dt, th) = (step.dt, step.theta);
    let (rho, nu) = (params.rho_f, params.nu_f);
    let g = [0.5 - 0.15f64.sqrt(), 0.5, 0.5 + 0.15f64.sqrt()];
    let gw = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let nodes: Vec<[f64; 3]> = (0..dofmap.n_support()).map(|n| *dofmap.support_point(n)).collect();
    let pr = dofmap.pressure_dofs(0).unwrap();
    let mut r = vec![0.0; dofmap.n_dofs()];
    for (qx, wx) in g.iter().zip(&gw) {
        for (qy, wy) in g.iter().zip(&gw) {
            let w = wx * wy;
            let basis: Vec<(f64, [f64; 2])> = nodes
                .iter()
                .map(|s| {
                    let (lx, dx) = lagrange2(s[0], *qx);
                    let (ly, dy) = lagrange2(s[1], *qy);
                    (lx * ly, [dx * ly, lx * dy])
                })
                .collect();
            let field = |v: &[f64]| {
                let mut val = [0.0; 2];
                let mut grad = [[0.0; 2]; 2];
                for (n, (phi, dphi)) in basis.iter().enumerate() {
                    for a in 0..2 {
                        let c = v[dofmap.v_dof(n, a)];
                        val[a] += c * phi;
                        grad[a][0] += c * dphi[0];
                        grad[a][1] += c * dphi[1];
                    }
                }
                (val, grad)
            };
            let (v, gv) = field(x);
            let (vo, gvo) = field(xo);
            let psi = [1.0, qx - 0.5, qy - 0.5];
            let p: f64 = pr.clone().zip(psi).map(|(k, s)| x[k] * s).sum();
            let mut f = [0.0; 2];
            let mut stress = [[0.0; 2]; 2];
            for a in 0..2 {
                let conv: f64 = (0..2).map(|b| gv[a][b] * v[b]).sum();
                let conv_o: f64 = (0..2).map(|b| gvo[a][b] * vo[b]).sum();
                f[a] = rho * (v[a] - vo[a]) + dt * th * rho * conv + dt * (1.0 - th) * rho * conv_o;
                for b in 0..2 {
                    stress[a][b] = dt * th * rho * nu * (gv[a][b] + gv[b][a])
                        + dt * (1.0 - th) * rho * nu * (gvo[a][b] + gvo[b][a]);
                }
                stress[a][a] -= dt * p;
            }
            for (n, (phi, dphi)) in basis.iter().enumerate() {
                for a in 0..2 {
                    r[dofmap.v_dof(n, a)] += w * (f[a] * phi + stress[a][0] * dphi[0] + stress[a][1] * dphi[1]);
                }
            }
            for (k, s) in pr.clone().zip(psi) {
                r[k] += w * (gv[0][0] + gv[1][1]) * s;
            }
        }
    }
    r
}

#[test]
fn ale_form_reduces_to_eulerian_without_displacement() {
    let mesh = single_cell_mesh(2, Subdomain::Fluid);
    let dofmap = distribute_dofs_single_domain(&mesh, ElementPair::new(2, 2)).unwrap();
    let params = MaterialParams::default();
    let asm = Assembler::new(&mesh, &dofmap, params);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let mut x = random_state(&dofmap, &mut rng, 0.0, 1.0, 10.0);
        let mut xo = random_state(&dofmap, &mut rng, 0.0, 1.0, 10.0);
        for i in 0..dofmap.n_dofs() {
            if matches!(dofmap.field(i), Field::Pressure) {
                xo[i] = 0.0;
            }
            if matches!(dofmap.field(i), Field::Displacement(_)) {
                x[i] = 0.0;
                xo[i] = 0.0;
            }
        }
        let step = StepParams {
            dt: rng.random_range(1e-3..0.1),
            theta: rng.random_range(0.5..1.0),
        };
        let ale = asm.raw_residual(&x, &xo, step).unwrap();
        let eul = eulerian_residual(&dofmap, &params, &x, &xo, step);
        let scale = norm_inf(&eul);
        for node in 0..dofmap.n_support() {
            // The outflow facet carries the do-nothing correction.
            if dofmap.support_point(node)[0] == 1.0 {
                continue;
            }
            for a in 0..2 {
                let d = dofmap.v_dof(node, a);
                assert!((ale[d] - eul[d]).abs() <= 1e-12 * scale, "row {d}: {} vs {}", ale[d], eul[d]);
            }
        }
        for k in dofmap.pressure_dofs(0).unwrap() {
            assert!((ale[k] - eul[k]).abs() <= 1e-12 * scale);
        }
    }
}
