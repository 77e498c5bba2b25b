use std::cell::Cell;

use fsi_core::time::{
    newton_solve, LinearizedSystem, NewtonConfig, NonlinearSystem, ScalarOde, ThetaScheme, ThetaVariant,
};
use fsi_core::{Error, Result};
use proptest::prelude::*;

fn step(f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64, u: f64, scheme: ThetaScheme) -> f64 {
    let ode = ScalarOde {
        f,
        df,
        u_old: u,
        scheme,
    };
    let cfg = NewtonConfig {
        tolerance: 1e-11,
        ..NewtonConfig::default()
    };
    newton_solve(&ode, vec![u], &cfg).unwrap().0[0]
}

/// Error at t = 1 of u' = −u², u(0) = 1, whose solution is 1 / (1 + t).
fn riccati_error(variant: ThetaVariant, n: usize) -> f64 {
    let dt = 1.0 / n as f64;
    let scheme = ThetaScheme::new(variant, dt).unwrap();
    let mut u = 1.0;
    for _ in 0..n {
        u = step(&|u| -u * u, &|u| -2.0 * u, u, scheme);
    }
    (u - 0.5).abs()
}

#[test]
fn implicit_euler_is_first_order() {
    let rate = (riccati_error(ThetaVariant::Implicit, 40) / riccati_error(ThetaVariant::Implicit, 80)).log2();
    assert!((rate - 1.0).abs() < 0.1, "rate {rate}");
}

#[test]
fn crank_nicolson_is_second_order() {
    let e1 = riccati_error(ThetaVariant::CrankNicolson, 40);
    let e2 = riccati_error(ThetaVariant::CrankNicolson, 80);
    let rate = (e1 / e2).log2();
    assert!((rate - 2.0).abs() < 0.1, "rate {rate}");
}

#[test]
fn shifted_crank_nicolson_converges() {
    let e1 = riccati_error(ThetaVariant::ShiftedCrankNicolson, 40);
    let e2 = riccati_error(ThetaVariant::ShiftedCrankNicolson, 80);
    assert!(e2 < e1 && e2 < 1e-3);
}

/// Scalar root finding `g(x) = 0` with a deliberately scaled derivative.
struct Scalar<'a> {
    g: &'a dyn Fn(f64) -> f64,
    dg: &'a dyn Fn(f64) -> f64,
    slope_error: f64,
    builds: Cell<usize>,
}

struct Fixed(f64);

impl LinearizedSystem for Fixed {
    fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, usize)> {
        Ok((vec![b[0] / self.0], 1))
    }
}

impl NonlinearSystem for Scalar<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![(self.g)(x[0])])
    }

    fn linearize(&self, x: &[f64]) -> Result<Box<dyn LinearizedSystem + '_>> {
        self.builds.set(self.builds.get() + 1);
        Ok(Box::new(Fixed((self.dg)(x[0]) * self.slope_error)))
    }
}

proptest! {
    #[test]
    fn implicit_step_matches_closed_form(lambda in 0.0..50.0f64, dt in 1e-3..0.5f64, u0 in -5.0..5.0f64) {
        let s = ThetaScheme::new(ThetaVariant::Implicit, dt).unwrap();
        let u1 = step(&|u| -lambda * u, &|_| -lambda, u0, s);
        prop_assert!((u1 - u0 / (1.0 + lambda * dt)).abs() <= 1e-12 * u0.abs().max(1.0));
    }

    #[test]
    fn cn_step_matches_closed_form(lambda in 0.0..50.0f64, dt in 1e-3..0.5f64, u0 in -5.0..5.0f64) {
        let s = ThetaScheme::new(ThetaVariant::CrankNicolson, dt).unwrap();
        let u1 = step(&|u| -lambda * u, &|_| -lambda, u0, s);
        let exact = u0 * (1.0 - 0.5 * lambda * dt) / (1.0 + 0.5 * lambda * dt);
        prop_assert!((u1 - exact).abs() <= 1e-12 * u0.abs().max(1.0));
    }

    #[test]
    fn shifted_theta_is_half_plus_dt(dt in 1e-5..0.49f64) {
        let s = ThetaScheme::new(ThetaVariant::ShiftedCrankNicolson, dt).unwrap();
        prop_assert_eq!(s.theta(), 0.5 + dt);
        prop_assert_eq!(s.step_params().theta, 0.5 + dt);
    }

    #[test]
    fn stopping_and_reassembly_follow_the_rule(
        c in 0.5..3.0f64,
        x0 in 0.5..3.0f64,
        slope_error in 0.8..1.25f64,
    ) {
        let g = |x: f64| x * x * x + c * x - 1.0;
        let dg = |x: f64| 3.0 * x * x + c;
        let sys = Scalar { g: &g, dg: &dg, slope_error, builds: Cell::new(0) };
        let cfg = NewtonConfig::default();
        let (_, stats) = newton_solve(&sys, vec![x0], &cfg).unwrap();
        let h = &stats.residual_history;
        let r0 = h[0];
        prop_assert_eq!(h.len(), stats.iterations + 1);
        prop_assert!(*h.last().unwrap() < cfg.tolerance * r0);
        for &r in &h[1..h.len() - 1] {
            prop_assert!(r >= cfg.tolerance * r0);
        }
        let expected = 1 + (1..stats.iterations).filter(|&k| h[k] > cfg.reassembly_factor * h[k - 1]).count();
        prop_assert_eq!(stats.reassemblies, expected);
        prop_assert_eq!(sys.builds.get(), expected);
    }

    #[test]
    fn full_newton_needs_no_more_iterations(c in 0.5..3.0f64, x0 in 0.5..3.0f64) {
        let g = |x: f64| x * x * x + c * x - 1.0;
        let dg = |x: f64| 3.0 * x * x + c;
        let cfg = NewtonConfig::default();
        let quasi = Scalar { g: &g, dg: &dg, slope_error: 1.0, builds: Cell::new(0) };
        let (_, q) = newton_solve(&quasi, vec![x0], &cfg).unwrap();
        let full = Scalar { g: &g, dg: &dg, slope_error: 1.0, builds: Cell::new(0) };
        let (_, f) = newton_solve(&full, vec![x0], &NewtonConfig { always_reassemble: true, ..cfg }).unwrap();
        prop_assert!(f.iterations <= q.iterations);
        prop_assert_eq!(f.reassemblies, f.iterations);
    }
}

#[test]
fn zero_initial_residual_takes_no_iterations() {
    let g = |x: f64| x - 2.0;
    let dg = |_: f64| 1.0;
    let sys = Scalar {
        g: &g,
        dg: &dg,
        slope_error: 1.0,
        builds: Cell::new(0),
    };
    let (x, stats) = newton_solve(&sys, vec![2.0], &NewtonConfig::default()).unwrap();
    assert_eq!(x, vec![2.0]);
    assert_eq!(stats.iterations, 0);
    assert_eq!(sys.builds.get(), 0);
}

#[test]
fn rootless_problem_reports_nonconvergence() {
    let g = |x: f64| x * x + 1.0;
    let dg = |x: f64| 2.0 * x;
    let sys = Scalar {
        g: &g,
        dg: &dg,
        slope_error: 1.0,
        builds: Cell::new(0),
    };
    match newton_solve(&sys, vec![0.3], &NewtonConfig::default()) {
        Err(Error::NewtonNonConvergence { stats }) => assert_eq!(stats.iterations, 30),
        other => panic!("expected nonconvergence, got {other:?}"),
    }
}
