//! Small dense tensors for quadrature-point kinematics.
//!
//! Both 2D and 3D problems use the same 3x3 storage; in 2D the third row and
//! column stay zero and `dim` restricts determinants, inverses and identities
//! to the active block.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor {
    pub dim: usize,
    pub m: [[f64; 3]; 3],
}

impl Tensor {
    pub fn zeros(dim: usize) -> Self {
        Tensor { dim, m: [[0.0; 3]; 3] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Tensor::zeros(dim);
        for i in 0..dim {
            t.m[i][i] = 1.0;
        }
        t
    }

    pub fn from_rows(dim: usize, rows: &[&[f64]]) -> Self {
        let mut t = Tensor::zeros(dim);
        for (i, row) in rows.iter().enumerate().take(dim) {
            for (j, &v) in row.iter().enumerate().take(dim) {
                t.m[i][j] = v;
            }
        }
        t
    }

    /// Rank-one tensor `a ⊗ b`.
    pub fn outer(dim: usize, a: &Vec3, b: &Vec3) -> Self {
        let mut t = Tensor::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.m[i][j] = a[i] * b[j];
            }
        }
        t
    }

    /// Tensor whose only nonzero row is `row`, filled with `g`.
    pub fn unit_row(dim: usize, row: usize, g: &Vec3) -> Self {
        let mut t = Tensor::zeros(dim);
        t.m[row][..dim].copy_from_slice(&g[..dim]);
        t
    }

    pub fn transpose(&self) -> Self {
        let mut t = Tensor::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.m[i][j] = self.m[j][i];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        match self.dim {
            1 => m[0][0],
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
        }
    }

    /// Inverse; the caller guarantees a nonzero determinant.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        let m = &self.m;
        let mut t = Tensor::zeros(self.dim);
        match self.dim {
            1 => t.m[0][0] = 1.0 / d,
            2 => {
                t.m[0][0] = m[1][1] / d;
                t.m[0][1] = -m[0][1] / d;
                t.m[1][0] = -m[1][0] / d;
                t.m[1][1] = m[0][0] / d;
            }
            _ => {
                t.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
                t.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
                t.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
                t.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
                t.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
                t.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
                t.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
                t.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
                t.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = *self;
        for row in t.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        t
    }

    pub fn dot(&self, other: &Tensor) -> Self {
        let n = self.dim;
        let mut t = Tensor::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.m[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    t.m[i][j] += a * other.m[k][j];
                }
            }
        }
        t
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim).map(|j| self.m[i][j] * v[j]).sum();
        }
        out
    }

    /// Double contraction `A : B`.
    pub fn ddot(&self, other: &Tensor) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |a, &b| a.max(b.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| (self.m[i][j] - self.m[j][i]).abs() <= tol))
    }
}

impl Add for Tensor {
    type Output = Tensor;
    fn add(mut self, rhs: Tensor) -> Tensor {
        self += rhs;
        self
    }
}

impl AddAssign for Tensor {
    fn add_assign(&mut self, rhs: Tensor) {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] += rhs.m[i][j];
            }
        }
    }
}

impl Sub for Tensor {
    type Output = Tensor;
    fn sub(mut self, rhs: Tensor) -> Tensor {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] -= rhs.m[i][j];
            }
        }
        self
    }
}

impl Neg for Tensor {
    type Output = Tensor;
    fn neg(self) -> Tensor {
        self.scale(-1.0)
    }
}

impl Mul<Tensor> for Tensor {
    type Output = Tensor;
    fn mul(self, rhs: Tensor) -> Tensor {
        self.dot(&rhs)
    }
}

impl Mul<f64> for Tensor {
    type Output = Tensor;
    fn mul(self, rhs: f64) -> Tensor {
        self.scale(rhs)
    }
}

pub fn vdot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn vsub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn vadd(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn vscale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn vnorm(a: &Vec3) -> f64 {
    vdot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip_3d() {
        let a = Tensor::from_rows(3, &[&[2.0, 0.3, -0.1], &[0.1, 1.5, 0.2], &[0.0, -0.4, 1.1]]);
        let p = a * a.inverse();
        assert!((p - Tensor::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn two_d_ignores_padding() {
        let a = Tensor::from_rows(2, &[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(a.det(), -2.0);
        assert_eq!(Tensor::identity(2).trace(), 2.0);
        let p = a * a.inverse();
        assert!((p - Tensor::identity(2)).max_abs() < 1e-14);
    }
}
