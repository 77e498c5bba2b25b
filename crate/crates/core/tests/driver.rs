use fsi_core::config::{parse_config, SolverConfig};
use fsi_core::driver::{read_time_series, run, scaling_run, write_scaling_csv, SCALING_COLUMNS};
use fsi_core::physics::Benchmark;
use fsi_core::Error;

fn short_fsi2(dir: &std::path::Path, steps: usize) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    cfg.refine_level = 0;
    cfg.t_end = steps as f64 * cfg.dt;
    cfg.output_dir = dir.to_path_buf();
    cfg
}

#[test]
fn zero_inflow_run_has_zero_functionals() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short_fsi2(dir.path(), 1);
    cfg.mean_velocity = Some(0.0);
    let summary = run(&cfg).unwrap();
    let ts = read_time_series(&std::fs::read_to_string(&summary.csv_path).unwrap()).unwrap();
    assert_eq!(ts.rows.len(), 1);
    for col in ["ux", "uy", "drag", "lift", "newton_iters"] {
        assert_eq!(ts.column(col).unwrap(), vec![0.0], "{col}");
    }
    assert_eq!(ts.meta["rho_s"], "10000");
    assert_eq!(ts.meta["mu"], "500000");
}

#[test]
fn repeated_runs_are_bit_identical() {
    for threads in [1, 2] {
        let mut texts = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let mut cfg = short_fsi2(dir.path(), 3);
            cfg.threads = threads;
            let summary = run(&cfg).unwrap();
            texts.push(std::fs::read(&summary.csv_path).unwrap());
        }
        assert_eq!(texts[0], texts[1], "threads = {threads}");
    }
}

#[test]
fn csv_rows_increase_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_fsi2(dir.path(), 3);
    let summary = run(&cfg).unwrap();
    let ts = read_time_series(&std::fs::read_to_string(&summary.csv_path).unwrap()).unwrap();
    assert_eq!(
        ts.columns,
        ["t", "ux", "uy", "drag", "lift", "newton_iters", "avg_gmres_iters"]
    );
    let t = ts.column("t").unwrap();
    assert_eq!(t.len(), 3);
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    for (row, rec) in ts.rows.iter().zip(&summary.rows) {
        assert!((row[3] - rec.force[0]).abs() <= 1e-8 * rec.force[0].abs());
        assert_eq!(row[5] as usize, rec.newton_iters);
    }
    // The ramping inflow pushes the obstacle downstream.
    assert!(ts.column("drag").unwrap().iter().all(|&d| d > 0.0));
}

#[test]
fn failed_run_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short_fsi2(dir.path(), 3);
    cfg.newton_max_iter = 1;
    cfg.newton_tolerance = 1e-14;
    let (err, path) = run(&cfg).unwrap_err();
    assert!(matches!(err, Error::NewtonNonConvergence { .. }), "{err}");
    let text = std::fs::read_to_string(path.unwrap()).unwrap();
    let ts = read_time_series(&text).unwrap();
    assert_eq!(ts.columns.len(), 7);
    assert!(ts.rows.is_empty());
}

#[test]
fn box3d_step_reports_four_points() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SolverConfig::default();
    cfg.benchmark = Benchmark::Box3d;
    cfg.refine_level = 0;
    cfg.dt = 0.01;
    cfg.t_end = 0.01;
    cfg.output_dir = dir.path().to_path_buf();
    let summary = run(&cfg).unwrap();
    let ts = read_time_series(&std::fs::read_to_string(&summary.csv_path).unwrap()).unwrap();
    for p in 1..=4 {
        for c in ["ux", "uy", "uz"] {
            assert!(ts.column(&format!("p{p}_{c}")).is_some());
        }
    }
    assert!(ts.column("side_force").is_some());
    assert!(summary.min_jacobian > 0.0);
}

#[test]
fn scaling_rows_cover_requested_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("[problem]\nrefine_level = 0\n").unwrap();
    let rows = scaling_run(&cfg, &[1, 2], 1).unwrap();
    assert_eq!(rows.iter().map(|r| r.threads).collect::<Vec<_>>(), [1, 2]);
    assert!(rows.iter().all(|r| r.gmres_iters > 0 && r.t_fluid > 0.0));
    let path = dir.path().join("s.csv");
    write_scaling_csv(&path, &rows).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next().unwrap(), SCALING_COLUMNS);
    assert_eq!(text.lines().count(), 3);
}
