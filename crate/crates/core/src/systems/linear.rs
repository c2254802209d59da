use nalgebra::{DMatrix, DVector};

use super::KinematicSystem;
use crate::error::{Error, Result};
use crate::model::{min_singular_value, BlockLayout, RANK_TOLERANCE};
use crate::scalar::Scalar;

/// `h(q) = B q` with a constant tall full-column-rank `B`.
#[derive(Debug, Clone)]
pub struct LinearTallSystem<T: Scalar> {
    layout: BlockLayout,
    b: DMatrix<T>,
}

impl<T: Scalar> LinearTallSystem<T> {
    /// `b` must respect the star pattern of `layout` and have full column rank.
    pub fn new(layout: BlockLayout, b: DMatrix<T>) -> Result<Self> {
        if b.shape() != (layout.n(), layout.m()) {
            return Err(Error::dim(format!(
                "B is {:?}, layout expects {:?}",
                b.shape(),
                (layout.n(), layout.m())
            )));
        }
        for r in 0..layout.n() {
            for c in 0..layout.m() {
                if layout.is_structural_zero(r, c) && b[(r, c)] != T::zero() {
                    return Err(Error::dim(format!("B[{r},{c}] is outside the star pattern")));
                }
            }
        }
        let (lo, hi) = crate::model::singular_value_range(&b);
        if !(lo >= T::lit(RANK_TOLERANCE) * hi) || hi == T::zero() {
            return Err(Error::Singular {
                sigma_min: lo.as_f64(),
                sigma_max: hi.as_f64(),
            });
        }
        Ok(Self { layout, b })
    }

    /// Unstructured system over [`BlockLayout::dense`].
    pub fn dense(b: DMatrix<T>) -> Result<Self> {
        let layout = BlockLayout::dense(b.nrows(), b.ncols())?;
        Self::new(layout, b)
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.b
    }

    pub fn min_singular_value(&self) -> T {
        min_singular_value(&self.b)
    }
}

impl<T: Scalar> KinematicSystem<T> for LinearTallSystem<T> {
    fn name(&self) -> &str {
        "linear-tall"
    }

    fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    fn reference_configuration(&self) -> DVector<T> {
        DVector::zeros(self.layout.m())
    }

    fn agent_position(&self, i: usize, q_i: &[T], q_load: &[T]) -> Result<DVector<T>> {
        let (d, l) = self.agent_jacobian(i, q_i, q_load)?;
        Ok(d * DVector::from_column_slice(q_i) + l * DVector::from_column_slice(q_load))
    }

    fn agent_jacobian(&self, i: usize, _q_i: &[T], _q_load: &[T]) -> Result<(DMatrix<T>, DMatrix<T>)> {
        let rows = self.layout.pos_range(i);
        let cols = self.layout.agent_range(i);
        let load = self.layout.load_range();
        Ok((
            self.b.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned(),
            self.b.view((rows.start, load.start), (rows.len(), load.len())).into_owned(),
        ))
    }
}
