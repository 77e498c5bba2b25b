use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense 3×3 block matrix, `a[i][j]` the block in block-row `i`, block-column `j`.
#[derive(Debug, Clone)]
pub struct DenseBlocks {
    pub a: [[DMatrix<f64>; 3]; 3],
}

impl DenseBlocks {
    pub fn sizes(&self) -> [usize; 3] {
        [self.a[0][0].nrows(), self.a[1][1].nrows(), self.a[2][2].nrows()]
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        let s = self.sizes();
        let off = [0, s[0], s[0] + s[1]];
        let n = s.iter().sum();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..3 {
            for j in 0..3 {
                out.view_mut((off[i], off[j]), (s[i], s[j])).copy_from(&self.a[i][j]);
            }
        }
        out
    }
}

fn inv(m: &DMatrix<f64>, step: usize) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    m.clone().try_inverse().ok_or(Error::SingularMatrix { step })
}

/// Which parts of the exact factorization to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LduVariant {
    /// Full block elimination with exact Schur complements.
    Exact,
    /// `C_sm` dropped, `C̃_fs` replaced by `C_fs` and `X` by `F`.
    Simplified,
}

/// Applies the block LDU factorization of a dense 3×3 block matrix to `r`.
///
/// With [`LduVariant::Exact`] this is an exact solve using
/// `S̃ = S − C_sm M⁻¹ C_ms`, `C̃_fs = C_fs − C_fm M⁻¹ C_ms` and
/// `X = F − C_fm M⁻¹ C_mf − C̃_fs S̃⁻¹ C̃_sf`.
pub fn block_ldu_dense(blocks: &DenseBlocks, r: &DVector<f64>, variant: LduVariant) -> Result<DVector<f64>> {
    let a = &blocks.a;
    let s = blocks.sizes();
    let r_m = r.rows(0, s[0]).into_owned();
    let r_s = r.rows(s[0], s[1]).into_owned();
    let r_f = r.rows(s[0] + s[1], s[2]).into_owned();
    let m_inv = inv(&a[0][0], 0)?;

    let (s_t, c_fs_t, c_sf_t, x_mat) = match variant {
        LduVariant::Exact => {
            let s_t = &a[1][1] - &a[1][0] * &m_inv * &a[0][1];
            let c_fs_t = &a[2][1] - &a[2][0] * &m_inv * &a[0][1];
            let c_sf_t = &a[1][2] - &a[1][0] * &m_inv * &a[0][2];
            let s_t_inv = inv(&s_t, 1)?;
            let x = &a[2][2] - &a[2][0] * &m_inv * &a[0][2] - &c_fs_t * &s_t_inv * &c_sf_t;
            (s_t, c_fs_t, c_sf_t, x)
        }
        LduVariant::Simplified => (a[1][1].clone(), a[2][1].clone(), a[1][2].clone(), a[2][2].clone()),
    };
    let s_inv = inv(&s_t, 1)?;
    let x_inv = inv(&x_mat, 2)?;

    let z_m = &m_inv * &r_m;
    let c_sm = if variant == LduVariant::Exact {
        a[1][0].clone()
    } else {
        DMatrix::zeros(s[1], s[0])
    };
    let y_s = &r_s - &c_sm * &z_m;
    let z_s = &s_inv * &y_s;
    let y_f = &r_f - &a[2][0] * &z_m - &c_fs_t * &z_s;
    let x_f = &x_inv * &y_f;
    let x_s = &z_s - &s_inv * (&c_sf_t * &x_f);
    let x_m = &z_m - &m_inv * (&a[0][1] * &x_s + &a[0][2] * &x_f);
    let mut out = DVector::zeros(r.len());
    out.rows_mut(0, s[0]).copy_from(&x_m);
    out.rows_mut(s[0], s[1]).copy_from(&x_s);
    out.rows_mut(s[0] + s[1], s[2]).copy_from(&x_f);
    Ok(out)
}

/// Exact solve through the full block LDU factorization.
pub fn exact_ldu_reference(blocks: &DenseBlocks, r: &DVector<f64>) -> Result<DVector<f64>> {
    block_ldu_dense(blocks, r, LduVariant::Exact)
}
