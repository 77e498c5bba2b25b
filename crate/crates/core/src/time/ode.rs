use super::newton::{LinearizedSystem, NonlinearSystem};
use super::theta::ThetaScheme;
use crate::error::{Error, Result};

/// One θ-step of the scalar ODE `u' = f(u)` posed as a nonlinear system.
pub struct ScalarOde<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub df: &'a dyn Fn(f64) -> f64,
    pub u_old: f64,
    pub scheme: ThetaScheme,
}

struct Scalar(f64);

impl LinearizedSystem for Scalar {
    fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, usize)> {
        if self.0 == 0.0 {
            return Err(Error::SingularMatrix { step: 0 });
        }
        Ok((vec![b[0] / self.0], 0))
    }
}

impl NonlinearSystem for ScalarOde<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (dt, th) = (self.scheme.dt(), self.scheme.theta());
        Ok(vec![
            x[0] - self.u_old - dt * (th * (self.f)(x[0]) + (1.0 - th) * (self.f)(self.u_old)),
        ])
    }

    fn linearize(&self, x: &[f64]) -> Result<Box<dyn LinearizedSystem + '_>> {
        let (dt, th) = (self.scheme.dt(), self.scheme.theta());
        Ok(Box::new(Scalar(1.0 - dt * th * (self.df)(x[0]))))
    }
}
