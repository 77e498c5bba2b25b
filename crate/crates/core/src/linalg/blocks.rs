use super::gmres::LinearOperator;
use super::sparse::CsrMatrix;

pub const MESH: usize = 0;
pub const SOLID: usize = 1;
pub const FLUID: usize = 2;

/// Assignment of global dofs to the mesh, solid and fluid blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLayout {
    /// Block of every global dof.
    pub class: Vec<usize>,
    /// Position of every global dof inside its block.
    pub pos: Vec<usize>,
    /// Global dofs of each block in block order.
    pub dofs: [Vec<usize>; 3],
    /// Velocity dofs at the start of the fluid block; pressures follow.
    pub fluid_velocity: usize,
}

impl BlockLayout {
    pub fn new(dofs: [Vec<usize>; 3], fluid_velocity: usize) -> Self {
        let n: usize = dofs.iter().map(Vec::len).sum();
        let mut class = vec![usize::MAX; n];
        let mut pos = vec![usize::MAX; n];
        for (b, list) in dofs.iter().enumerate() {
            for (i, &d) in list.iter().enumerate() {
                class[d] = b;
                pos[d] = i;
            }
        }
        assert!(class.iter().all(|&c| c != usize::MAX), "blocks must cover every dof");
        BlockLayout {
            class,
            pos,
            dofs,
            fluid_velocity,
        }
    }

    pub fn n(&self) -> usize {
        self.class.len()
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.dofs[0].len(), self.dofs[1].len(), self.dofs[2].len()]
    }

    /// Global vector to concatenated block order `[mesh, solid, fluid]`.
    pub fn to_block_order(&self, v: &[f64]) -> Vec<f64> {
        self.dofs.iter().flat_map(|l| l.iter().map(|&d| v[d])).collect()
    }

    pub fn from_block_order(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        let mut k = 0;
        for list in &self.dofs {
            for &d in list {
                out[d] = v[k];
                k += 1;
            }
        }
        out
    }
}

/// The 3×3 block matrix `[[M, C_ms, C_mf], [C_sm, S, C_sf], [C_fm, C_fs, F]]`.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub blocks: [[CsrMatrix; 3]; 3],
}

impl BlockSystem {
    pub fn sizes(&self) -> [usize; 3] {
        [self.blocks[0][0].nrows(), self.blocks[1][1].nrows(), self.blocks[2][2].nrows()]
    }

    pub fn offsets(&self) -> [usize; 4] {
        let s = self.sizes();
        [0, s[0], s[0] + s[1], s[0] + s[1] + s[2]]
    }

    pub fn m(&self) -> &CsrMatrix {
        &self.blocks[MESH][MESH]
    }

    pub fn s(&self) -> &CsrMatrix {
        &self.blocks[SOLID][SOLID]
    }

    pub fn f(&self) -> &CsrMatrix {
        &self.blocks[FLUID][FLUID]
    }

    pub fn c_ms(&self) -> &CsrMatrix {
        &self.blocks[MESH][SOLID]
    }

    pub fn c_mf(&self) -> &CsrMatrix {
        &self.blocks[MESH][FLUID]
    }

    pub fn c_sm(&self) -> &CsrMatrix {
        &self.blocks[SOLID][MESH]
    }

    pub fn c_sf(&self) -> &CsrMatrix {
        &self.blocks[SOLID][FLUID]
    }

    pub fn c_fm(&self) -> &CsrMatrix {
        &self.blocks[FLUID][MESH]
    }

    pub fn c_fs(&self) -> &CsrMatrix {
        &self.blocks[FLUID][SOLID]
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().flatten().map(CsrMatrix::nnz).sum()
    }

    /// The whole system as one matrix in concatenated block order.
    pub fn to_block_ordered_matrix(&self) -> CsrMatrix {
        let off = self.offsets();
        let n = off[3];
        let mut t = Vec::with_capacity(self.nnz());
        for (bi, row) in self.blocks.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                for i in 0..blk.nrows() {
                    let (c, v) = blk.row(i);
                    t.extend(c.iter().zip(v).map(|(&j, &x)| (off[bi] + i, off[bj] + j, x)));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }
}

impl LinearOperator for BlockSystem {
    fn dim(&self) -> usize {
        self.offsets()[3]
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let off = self.offsets();
        let mut tmp = Vec::new();
        for bi in 0..3 {
            let yi = &mut y[off[bi]..off[bi + 1]];
            yi.iter_mut().for_each(|v| *v = 0.0);
            for bj in 0..3 {
                let blk = &self.blocks[bi][bj];
                if blk.nnz() == 0 {
                    continue;
                }
                tmp.resize(blk.nrows(), 0.0);
                blk.par_matvec(&x[off[bj]..off[bj + 1]], &mut tmp);
                for (a, b) in yi.iter_mut().zip(&tmp) {
                    *a += b;
                }
            }
        }
    }
}

/// Routes every stored entry to its `(row block, column block)` submatrix.
pub fn extract_blocks(a: &CsrMatrix, layout: &BlockLayout) -> BlockSystem {
    let sizes = layout.sizes();
    let blocks = std::array::from_fn(|bi| {
        std::array::from_fn(|bj| {
            let col_map: Vec<usize> = (0..layout.n())
                .map(|d| if layout.class[d] == bj { layout.pos[d] } else { usize::MAX })
                .collect();
            a.select(&layout.dofs[bi], &col_map, sizes[bj])
        })
    });
    BlockSystem { blocks }
}

/// Inverse of [`extract_blocks`].
pub fn merge_blocks(sys: &BlockSystem, layout: &BlockLayout) -> CsrMatrix {
    let n = layout.n();
    let mut t = Vec::with_capacity(sys.nnz());
    for (bi, row) in sys.blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            for i in 0..blk.nrows() {
                let (c, v) = blk.row(i);
                let gi = layout.dofs[bi][i];
                t.extend(c.iter().zip(v).map(|(&j, &x)| (gi, layout.dofs[bj][j], x)));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_identity_blocks() {
        let layout = BlockLayout::new([vec![0, 3], vec![1], vec![2, 4]], 1);
        let sys = extract_blocks(&CsrMatrix::identity(5), &layout);
        for bi in 0..3 {
            for bj in 0..3 {
                let b = &sys.blocks[bi][bj];
                if bi == bj {
                    assert_eq!(*b, CsrMatrix::identity(b.nrows()));
                } else {
                    assert_eq!(b.nnz(), 0);
                }
            }
        }
    }
}
