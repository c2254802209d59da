use nalgebra::DMatrix;

use super::BlockLayout;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Star-structured Jacobian: one diagonal block `dh_i/dq_i` and one load
/// column block `dh_i/dq_L` per agent, plus the assembled dense `n x m` view.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockJacobian<T: Scalar> {
    layout: BlockLayout,
    diag_blocks: Vec<DMatrix<T>>,
    load_blocks: Vec<DMatrix<T>>,
    dense: DMatrix<T>,
}

/// Assembles `A_q` from its blocks. Entries outside the star pattern are
/// exactly zero.
pub fn assemble_jacobian<T: Scalar>(
    layout: &BlockLayout,
    diag_blocks: Vec<DMatrix<T>>,
    load_blocks: Vec<DMatrix<T>>,
) -> Result<BlockJacobian<T>> {
    let agents = layout.num_agents();
    if diag_blocks.len() != agents || load_blocks.len() != agents {
        return Err(Error::dim(format!(
            "layout has {agents} agents, got {} diagonal and {} load blocks",
            diag_blocks.len(),
            load_blocks.len()
        )));
    }
    let mut dense = DMatrix::zeros(layout.n(), layout.m());
    let load_cols = layout.load_range();
    for i in 0..agents {
        let rows = layout.pos_range(i);
        let cols = layout.agent_range(i);
        let (d, l) = (&diag_blocks[i], &load_blocks[i]);
        if d.shape() != (rows.len(), cols.len()) {
            return Err(Error::dim(format!(
                "agent {i} diagonal block is {:?}, expected {:?}",
                d.shape(),
                (rows.len(), cols.len())
            )));
        }
        if l.shape() != (rows.len(), load_cols.len()) {
            return Err(Error::dim(format!(
                "agent {i} load block is {:?}, expected {:?}",
                l.shape(),
                (rows.len(), load_cols.len())
            )));
        }
        dense
            .view_mut((rows.start, cols.start), d.shape())
            .copy_from(d);
        dense
            .view_mut((rows.start, load_cols.start), l.shape())
            .copy_from(l);
    }
    Ok(BlockJacobian {
        layout: layout.clone(),
        diag_blocks,
        load_blocks,
        dense,
    })
}

impl<T: Scalar> BlockJacobian<T> {
    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn dense(&self) -> &DMatrix<T> {
        &self.dense
    }

    pub fn into_dense(self) -> DMatrix<T> {
        self.dense
    }

    /// `A^(i)_{q_i}`.
    pub fn diag_block(&self, i: usize) -> &DMatrix<T> {
        &self.diag_blocks[i]
    }

    /// `A^(i)_{q_L}`.
    pub fn load_block(&self, i: usize) -> &DMatrix<T> {
        &self.load_blocks[i]
    }
}
