use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block dimensions of the configuration vector `q = (q_1, .., q_N, q_L)` and
/// of the stacked agent positions `p = (p_1, .., p_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    agent_dims: Vec<usize>,
    load_dim: usize,
    agent_pos_dims: Vec<usize>,
}

impl BlockLayout {
    /// Builds a star layout. Every block must be non-empty and the system
    /// must be over-redundant (`n > m`).
    pub fn new(agent_dims: Vec<usize>, load_dim: usize, agent_pos_dims: Vec<usize>) -> Result<Self> {
        let layout = Self::structural(agent_dims, load_dim, agent_pos_dims)?;
        if layout.n() <= layout.m() {
            return Err(Error::dim(format!(
                "layout is not over-redundant: n = {} <= m = {}",
                layout.n(),
                layout.m()
            )));
        }
        Ok(layout)
    }

    /// Same block checks as [`BlockLayout::new`] but only requires `n >= m`,
    /// so square star systems can be assembled too.
    pub fn structural(agent_dims: Vec<usize>, load_dim: usize, agent_pos_dims: Vec<usize>) -> Result<Self> {
        if agent_dims.is_empty() {
            return Err(Error::dim("layout needs at least one agent"));
        }
        if agent_dims.len() != agent_pos_dims.len() {
            return Err(Error::dim(format!(
                "{} agent configuration blocks but {} agent position blocks",
                agent_dims.len(),
                agent_pos_dims.len()
            )));
        }
        if load_dim == 0 || agent_dims.iter().chain(&agent_pos_dims).any(|&d| d == 0) {
            return Err(Error::dim("all block dimensions must be at least 1"));
        }
        let layout = Self {
            agent_dims,
            load_dim,
            agent_pos_dims,
        };
        if layout.n() < layout.m() {
            return Err(Error::dim(format!("layout is wide: n = {} < m = {}", layout.n(), layout.m())));
        }
        Ok(layout)
    }

    /// Unstructured layout for a plain tall `n x m` matrix: one agent block
    /// spanning all of `q` and `p`, and an empty load block.
    pub fn dense(n: usize, m: usize) -> Result<Self> {
        if m == 0 || n < m {
            return Err(Error::dim(format!("dense layout needs n >= m >= 1, got {n}x{m}")));
        }
        Ok(Self {
            agent_dims: vec![m],
            load_dim: 0,
            agent_pos_dims: vec![n],
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agent_dims.len()
    }

    /// Number of weight/gain blocks: one per agent plus the load.
    pub fn num_blocks(&self) -> usize {
        self.agent_dims.len() + 1
    }

    pub fn agent_dims(&self) -> &[usize] {
        &self.agent_dims
    }

    pub fn agent_pos_dims(&self) -> &[usize] {
        &self.agent_pos_dims
    }

    pub fn load_dim(&self) -> usize {
        self.load_dim
    }

    /// Configuration dimension `m`.
    pub fn m(&self) -> usize {
        self.agent_dims.iter().sum::<usize>() + self.load_dim
    }

    /// Workspace dimension `n`.
    pub fn n(&self) -> usize {
        self.agent_pos_dims.iter().sum()
    }

    pub fn agent_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.agent_dims[..i].iter().sum();
        start..start + self.agent_dims[i]
    }

    pub fn load_range(&self) -> Range<usize> {
        let start: usize = self.agent_dims.iter().sum();
        start..start + self.load_dim
    }

    /// Range of block `b` in `q`; `b == num_agents()` is the load.
    pub fn block_range(&self, b: usize) -> Range<usize> {
        if b == self.num_agents() {
            self.load_range()
        } else {
            self.agent_range(b)
        }
    }

    pub fn pos_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.agent_pos_dims[..i].iter().sum();
        start..start + self.agent_pos_dims[i]
    }

    /// Repeats one value per block over the entries of that block.
    pub fn expand_blocks<T: Copy>(&self, per_block: &[T]) -> Result<Vec<T>> {
        if per_block.len() != self.num_blocks() {
            return Err(Error::dim(format!(
                "expected {} block values, got {}",
                self.num_blocks(),
                per_block.len()
            )));
        }
        let mut out = Vec::with_capacity(self.m());
        for (b, &value) in per_block.iter().enumerate() {
            out.extend(std::iter::repeat_n(value, self.block_range(b).len()));
        }
        Ok(out)
    }

    /// True when entry `(row, col)` of the Jacobian is outside the star pattern.
    pub fn is_structural_zero(&self, row: usize, col: usize) -> bool {
        if self.load_range().contains(&col) {
            return false;
        }
        (0..self.num_agents())
            .find(|&i| self.pos_range(i).contains(&row))
            .is_some_and(|i| !self.agent_range(i).contains(&col))
    }
}
