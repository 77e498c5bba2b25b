use crate::tensor::Vec3;

/// Tensor-product Gauss–Legendre rule on `[0, 1]^d`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_1d(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one quadrature point is required");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

impl QuadratureRule {
    /// `n` points per direction, exact for degree `2n − 1` in each variable.
    pub fn gauss(dim: usize, n: usize) -> Self {
        let (x, w) = gauss_legendre_1d(n);
        let total = n.pow(dim as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for idx in 0..total {
            let mut p = [0.0; 3];
            let mut wt = 1.0;
            let mut r = idx;
            for slot in p.iter_mut().take(dim) {
                *slot = x[r % n];
                wt *= w[r % n];
                r /= n;
            }
            points.push(p);
            weights.push(wt);
        }
        QuadratureRule { dim, points, weights }
    }

    /// Rule on local facet `2a + s` of the reference cell, embedded in cell coordinates.
    pub fn facet(dim: usize, n: usize, facet: usize) -> Self {
        let (axis, side) = (facet / 2, facet % 2);
        let sub = Self::gauss(dim - 1, n);
        let points = sub
            .points
            .iter()
            .map(|q| {
                let mut p = [0.0; 3];
                let mut k = 0;
                for (a, slot) in p.iter_mut().enumerate().take(dim) {
                    if a == axis {
                        *slot = side as f64;
                    } else {
                        *slot = q[k];
                        k += 1;
                    }
                }
                p
            })
            .collect();
        QuadratureRule {
            dim,
            points,
            weights: sub.weights,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Polynomial exactness per variable.
    pub fn degree(&self) -> usize {
        let n = (self.points.len() as f64).powf(1.0 / self.dim.max(1) as f64).round() as usize;
        2 * n - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for dim in 1..=3 {
            for n in 1..=5 {
                let r = QuadratureRule::gauss(dim, n);
                let s: f64 = r.weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exact_monomials_1d() {
        for n in 1..=6 {
            let (x, w) = gauss_legendre_1d(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((q - exact).abs() < 1e-14 * exact.max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn facet_points_lie_on_facet() {
        let r = QuadratureRule::facet(3, 2, 5);
        assert!(r.points.iter().all(|p| p[2] == 1.0));
        assert_eq!(r.len(), 4);
    }
}
