use std::sync::OnceLock;

use fsi_core::config::SolverConfig;
use fsi_core::driver::Problem;
use fsi_core::linalg::{
    extract_blocks, gmres, merge_blocks, BlockLayout, BlockLdu, BlockSolverConfig, CsrMatrix, GmresConfig,
    IdentityPreconditioner,
};
use fsi_core::physics::StepParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Block-LDU of the level-0 FSI-2 Jacobian at a perturbed state, with exact inner solves.
fn ldu() -> &'static BlockLdu {
    static LDU: OnceLock<BlockLdu> = OnceLock::new();
    LDU.get_or_init(|| {
        let mut cfg = SolverConfig::default();
        cfg.refine_level = 0;
        let problem = Problem::new(cfg).unwrap();
        let asm = problem.assembler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..problem.dofmap.n_dofs()).map(|_| 1e-4 * rng.random_range(-1.0..1.0)).collect();
        let step = StepParams { dt: 0.005, theta: 0.505 };
        let (a, _) = asm.jacobian(&x, &x, step).unwrap();
        let layout = problem.dofmap.block_layout();
        BlockLdu::new(extract_blocks(&a, &layout), &BlockSolverConfig::exact(), layout.fluid_velocity).unwrap()
    })
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn random_sparse(rng: &mut ChaCha8Rng, n: usize, per_row: usize, diag: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, diag));
        for _ in 0..per_row {
            t.push((i, rng.random_range(0..n), rng.random_range(-1.0..1.0)));
        }
    }
    CsrMatrix::from_triplets(n, n, &t)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn block_ldu_is_linear(seed in any::<u64>(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let p = ldu();
        let n = p.system().sizes().iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r1, r2) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
        let comb: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| alpha * a + beta * b).collect();
        let (mut z1, mut z2, mut zc) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        p.apply_block_ldu(&r1, &mut z1).unwrap();
        p.apply_block_ldu(&r2, &mut z2).unwrap();
        p.apply_block_ldu(&comb, &mut zc).unwrap();
        let diff: Vec<f64> = (0..n).map(|i| zc[i] - alpha * z1[i] - beta * z2[i]).collect();
        let scale = norm(&zc).max(alpha.abs() * norm(&z1) + beta.abs() * norm(&z2));
        prop_assert!(norm(&diff) <= 1e-10 * scale, "{} vs {}", norm(&diff), scale);
    }

    #[test]
    fn full_gmres_residuals_never_increase(seed in any::<u64>(), n in 5usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, 4, 2.0);
        let b = random_vec(&mut rng, n);
        let cfg = GmresConfig { reduction: 1e10, max_iter: n, restart: n };
        let out = match gmres(&a, &IdentityPreconditioner, &b, cfg) {
            Ok(o) => o.history,
            Err(fsi_core::Error::GmresNonConvergence { history, .. }) => history,
            Err(e) => panic!("{e}"),
        };
        for w in out.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn extract_then_merge_is_identity(seed in any::<u64>(), n in 3usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, n, 3, 1.0);
        let mut blocks: [Vec<usize>; 3] = Default::default();
        for d in 0..n {
            blocks[rng.random_range(0..3)].push(d);
        }
        let fv = blocks[2].len() / 2;
        let layout = BlockLayout::new(blocks, fv);
        let back = merge_blocks(&extract_blocks(&a, &layout), &layout);
        prop_assert_eq!(back.to_dense(), a.to_dense());
    }
}

#[test]
fn block_ldu_beats_plain_gmres_on_fsi_jacobian() {
    let p = ldu();
    let n = p.system().sizes().iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let b = random_vec(&mut rng, n);
    let cfg = GmresConfig {
        max_iter: 3000,
        ..GmresConfig::default()
    };
    let prec = gmres(p.system(), p, &b, cfg).unwrap().iterations;
    let plain = match gmres(p.system(), &IdentityPreconditioner, &b, cfg) {
        Ok(o) => o.iterations,
        Err(fsi_core::Error::GmresNonConvergence { iterations, .. }) => iterations,
        Err(e) => panic!("{e}"),
    };
    assert!(prec < plain, "{prec} vs {plain}");
}
