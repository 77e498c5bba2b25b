use crate::tensor::Vec3;

/// Scalar shape-function family on the reference cell `[0, 1]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    /// Continuous tensor-product Lagrange of degree `k` with nodes at `i/k`.
    Q(usize),
    /// Discontinuous complete polynomials of degree `k` in reference coordinates.
    DgP(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarElement {
    pub kind: ElementKind,
    pub dim: usize,
}

impl ScalarElement {
    pub fn q(k: usize, dim: usize) -> Self {
        ScalarElement {
            kind: ElementKind::Q(k),
            dim,
        }
    }

    pub fn dgp(k: usize, dim: usize) -> Self {
        ScalarElement {
            kind: ElementKind::DgP(k),
            dim,
        }
    }

    pub fn n_dofs(&self) -> usize {
        match self.kind {
            ElementKind::Q(k) => (k + 1).pow(self.dim as u32),
            ElementKind::DgP(0) => 1,
            ElementKind::DgP(1) => 1 + self.dim,
            ElementKind::DgP(k) => panic!("DG P{k} is not supported"),
        }
    }

    /// Reference coordinates of the nodal points of a `Q(k)` element.
    pub fn support_points(&self) -> Vec<Vec3> {
        let ElementKind::Q(k) = self.kind else {
            return Vec::new();
        };
        (0..self.n_dofs())
            .map(|i| {
                let m = self.multi_index(i);
                let mut p = [0.0; 3];
                for a in 0..self.dim {
                    p[a] = m[a] as f64 / k as f64;
                }
                p
            })
            .collect()
    }

    /// Lexicographic multi-index of local `Q(k)` node `i`.
    pub fn multi_index(&self, mut i: usize) -> [usize; 3] {
        let ElementKind::Q(k) = self.kind else {
            panic!("multi_index is defined for Q elements only");
        };
        let mut m = [0; 3];
        for slot in m.iter_mut().take(self.dim) {
            *slot = i % (k + 1);
            i /= k + 1;
        }
        m
    }
}

/// The velocity/displacement and pressure elements used together.
///
/// `Q(k)` for displacement and velocity, discontinuous `P(k−1)` for pressure.
/// The `k = 1` pair is not uniformly inf-sup stable and carries no pressure
/// stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementPair {
    pub order: usize,
    pub dim: usize,
}

impl ElementPair {
    pub fn new(order: usize, dim: usize) -> Self {
        assert!(order == 1 || order == 2, "element order must be 1 or 2");
        ElementPair { order, dim }
    }

    pub fn vector(&self) -> ScalarElement {
        ScalarElement::q(self.order, self.dim)
    }

    pub fn pressure(&self) -> ScalarElement {
        ScalarElement::dgp(self.order - 1, self.dim)
    }

    /// Gauss points per direction, exact to degree `2k + 1`.
    pub fn quadrature_points_1d(&self) -> usize {
        self.order + 1
    }
}

fn lagrange_1d(k: usize, i: usize, x: f64) -> (f64, f64) {
    match (k, i) {
        (1, 0) => (1.0 - x, -1.0),
        (1, 1) => (x, 1.0),
        (2, 0) => (2.0 * (x - 0.5) * (x - 1.0), 4.0 * x - 3.0),
        (2, 1) => (-4.0 * x * (x - 1.0), -8.0 * x + 4.0),
        (2, 2) => (2.0 * x * (x - 0.5), 4.0 * x - 1.0),
        _ => panic!("unsupported 1D Lagrange basis k={k} i={i}"),
    }
}

/// Values and reference gradients of all local basis functions at `xi`.
///
/// Panics when `xi` lies outside the reference cell.
pub fn shape_eval(element: &ScalarElement, xi: &Vec3) -> (Vec<f64>, Vec<Vec3>) {
    let dim = element.dim;
    for &x in &xi[..dim] {
        assert!(
            (-1e-12..=1.0 + 1e-12).contains(&x),
            "reference point {xi:?} is outside the reference cell"
        );
    }
    let n = element.n_dofs();
    let mut vals = vec![0.0; n];
    let mut grads = vec![[0.0; 3]; n];
    match element.kind {
        ElementKind::Q(k) => {
            for i in 0..n {
                let m = element.multi_index(i);
                let mut f = [(0.0, 0.0); 3];
                for a in 0..dim {
                    f[a] = lagrange_1d(k, m[a], xi[a]);
                }
                vals[i] = (0..dim).map(|a| f[a].0).product();
                for (j, g) in grads[i].iter_mut().enumerate().take(dim) {
                    *g = (0..dim).map(|a| if a == j { f[a].1 } else { f[a].0 }).product();
                }
            }
        }
        ElementKind::DgP(_) => {
            vals[0] = 1.0;
            for a in 1..n {
                vals[a] = xi[a - 1] - 0.5;
                grads[a][a - 1] = 1.0;
            }
        }
    }
    (vals, grads)
}

/// Basis values and reference gradients tabulated at a list of points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<Vec3>>,
}

impl Tabulation {
    pub fn new(element: &ScalarElement, points: &[Vec3]) -> Self {
        let (values, grads) = points.iter().map(|p| shape_eval(element, p)).unzip();
        Tabulation { values, grads }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q1_nodal_at_origin() {
        let (v, _) = shape_eval(&ScalarElement::q(1, 2), &[0.0, 0.0, 0.0]);
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn q2_edge_midpoint_nodal() {
        let e = ScalarElement::q(2, 1);
        let (v, _) = shape_eval(&e, &[0.5, 0.0, 0.0]);
        assert_eq!(v, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn q2_nodal_property() {
        for dim in [2, 3] {
            let e = ScalarElement::q(2, dim);
            for (i, p) in e.support_points().iter().enumerate() {
                let (v, _) = shape_eval(&e, p);
                for (j, vj) in v.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((vj - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn q1_vertex_order_matches_mesh() {
        let e = ScalarElement::q(1, 3);
        for (b, p) in e.support_points().iter().enumerate() {
            let want = [(b & 1) as f64, ((b >> 1) & 1) as f64, ((b >> 2) & 1) as f64];
            assert_eq!(*p, want);
        }
    }

    #[test]
    #[should_panic]
    fn outside_reference_cell_panics() {
        shape_eval(&ScalarElement::q(1, 2), &[1.5, 0.0, 0.0]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let e = ScalarElement::q(2, 3);
        let x = [0.31, 0.52, 0.77];
        let (_, g) = shape_eval(&e, &x);
        let h = 1e-6;
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let (vp, _) = shape_eval(&e, &xp);
            let (vm, _) = shape_eval(&e, &xm);
            for i in 0..e.n_dofs() {
                let fd = (vp[i] - vm[i]) / (2.0 * h);
                assert!((fd - g[i][a]).abs() < 1e-8);
            }
        }
    }
}
