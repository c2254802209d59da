//! Multi-agent systems with a star interaction topology: each agent position
//! `p_i = h_i(q_i, q_L)` depends only on its own coordinates and the load.

mod dynamics;
mod fly_crane;
mod linear;
mod planar;

use nalgebra::{DMatrix, DVector};

pub use dynamics::{coriolis_matrix, mass_matrix, CoriolisMode, DynamicParams};
pub use fly_crane::{FlyCrane4, FlyCraneParams};
pub use linear::LinearTallSystem;
pub use planar::{PlanarTriLink, PlanarTriLinkParams};

use crate::error::{Error, Result};
use crate::model::{assemble_jacobian, BlockJacobian, BlockLayout};
use crate::scalar::Scalar;

/// Forward kinematics `p = h(q)` with per-agent maps.
///
/// Implementors provide the agent-local maps; the stacked map and the
/// assembled Jacobian are derived from them, so the star pattern holds by
/// construction.
pub trait KinematicSystem<T: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    fn layout(&self) -> &BlockLayout;

    /// Default reference configuration `q^r`.
    fn reference_configuration(&self) -> DVector<T>;

    /// Position of agent `i`.
    fn agent_position(&self, i: usize, q_i: &[T], q_load: &[T]) -> Result<DVector<T>>;

    /// `(dh_i/dq_i, dh_i/dq_L)` for agent `i`.
    fn agent_jacobian(&self, i: usize, q_i: &[T], q_load: &[T]) -> Result<(DMatrix<T>, DMatrix<T>)>;

    fn forward_kinematics(&self, q: &DVector<T>) -> Result<DVector<T>> {
        let layout = self.layout();
        check_len(layout, q)?;
        let q_load = &q.as_slice()[layout.load_range()];
        let mut p = DVector::zeros(layout.n());
        for i in 0..layout.num_agents() {
            let pi = self.agent_position(i, &q.as_slice()[layout.agent_range(i)], q_load)?;
            p.rows_mut(layout.pos_range(i).start, pi.len()).copy_from(&pi);
        }
        Ok(p)
    }

    fn jacobian(&self, q: &DVector<T>) -> Result<BlockJacobian<T>> {
        let layout = self.layout();
        check_len(layout, q)?;
        let q_load = &q.as_slice()[layout.load_range()];
        let (diag, load): (Vec<_>, Vec<_>) = (0..layout.num_agents())
            .map(|i| self.agent_jacobian(i, &q.as_slice()[layout.agent_range(i)], q_load))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        assemble_jacobian(layout, diag, load)
    }
}

fn check_len<T: Scalar>(layout: &BlockLayout, q: &DVector<T>) -> Result<()> {
    if q.len() != layout.m() {
        return Err(Error::dim(format!("q has {} entries, layout expects {}", q.len(), layout.m())));
    }
    Ok(())
}

/// Selects the dense assembled `A_q` of a system.
pub fn jacobian_matrix<T: Scalar, S: KinematicSystem<T> + ?Sized>(sys: &S, q: &DVector<T>) -> Result<DMatrix<T>> {
    sys.jacobian(q).map(BlockJacobian::into_dense)
}
