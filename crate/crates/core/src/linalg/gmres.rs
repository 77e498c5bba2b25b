use super::sparse::{norm2, CsrMatrix};
use crate::error::{Error, Result};

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.par_matvec(x, y);
    }
}

/// Action `z ≈ P⁻¹ r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    /// Required ratio `‖b‖ / ‖b − A x‖`.
    pub reduction: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            reduction: 1e3,
            max_iter: 1000,
            restart: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Residual 2-norms, starting with `‖b‖`.
    pub history: Vec<f64>,
    pub relative_residual: f64,
}

/// Flexible right-preconditioned restarted GMRES with zero initial guess.
///
/// Because the preconditioner acts on the right, the monitored residual is
/// the true residual of the unpreconditioned system.
pub fn gmres(op: &dyn LinearOperator, prec: &dyn Preconditioner, b: &[f64], cfg: GmresConfig) -> Result<GmresOutcome> {
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side length does not match the operator");
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            x,
            iterations: 0,
            history: vec![0.0],
            relative_residual: 0.0,
        });
    }
    let target = bnorm / cfg.reduction;
    let m = cfg.restart.max(1);
    let mut r = b.to_vec();
    let mut beta = bnorm;
    let mut history = vec![beta];
    let mut total = 0;
    let mut w = vec![0.0; n];

    loop {
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && total < cfg.max_iter {
            let mut zk = vec![0.0; n];
            prec.apply(&v[k], &mut zk)?;
            op.apply(&zk, &mut w);
            z.push(zk);
            for (i, vi) in v.iter().enumerate() {
                let hik = super::sparse::dot(&w, vi);
                h[i][k] = hik;
                super::sparse::axpy(-hik, vi, &mut w);
            }
            let hn = norm2(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            if d == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / d;
                sn[k] = h[k + 1][k] / d;
            }
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k += 1;
            let res = g[k].abs();
            history.push(res);
            if res <= target || hn <= f64::EPSILON * bnorm {
                break;
            }
            v.push(w.iter().map(|wi| wi / hn).collect());
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        for (yi, zi) in y.iter().zip(&z) {
            super::sparse::axpy(*yi, zi, &mut x);
        }
        op.apply(&x, &mut w);
        for i in 0..n {
            r[i] = b[i] - w[i];
        }
        beta = norm2(&r);
        if beta <= target {
            if let Some(last) = history.last_mut() {
                *last = beta;
            }
            return Ok(GmresOutcome {
                x,
                iterations: total,
                history,
                relative_residual: beta / bnorm,
            });
        }
        if total >= cfg.max_iter || k == 0 {
            return Err(Error::GmresNonConvergence {
                iterations: total,
                relative_residual: beta / bnorm,
                best: x,
                history,
            });
        }
    }
}
