use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::KinematicSystem;
use crate::error::{Error, Result};
use crate::model::BlockLayout;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarTriLinkParams {
    pub link_lengths: [f64; 3],
    /// Attachment offsets `b_i` in the plane.
    pub offsets: [[f64; 2]; 3],
}

impl Default for PlanarTriLinkParams {
    /// Unit links attached at the vertices of an equilateral triangle of
    /// circumradius 0.5 m.
    fn default() -> Self {
        let vertex = |k: f64| {
            let a = std::f64::consts::FRAC_PI_2 + k * 2.0 * std::f64::consts::FRAC_PI_3;
            [0.5 * a.cos(), 0.5 * a.sin()]
        };
        Self {
            link_lengths: [1.0; 3],
            offsets: [vertex(0.0), vertex(1.0), vertex(2.0)],
        }
    }
}

/// Three planar links of angle `phi_i` hinged on a point load:
/// `p_i = q_L + b_i + l_i (cos phi_i, sin phi_i)`, so `n = 6`, `m = 5`.
#[derive(Debug, Clone)]
pub struct PlanarTriLink<T: Scalar> {
    layout: BlockLayout,
    lengths: [T; 3],
    offsets: [[T; 2]; 3],
    params: PlanarTriLinkParams,
}

impl<T: Scalar> PlanarTriLink<T> {
    pub fn new(params: PlanarTriLinkParams) -> Result<Self> {
        if params.link_lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidConfig(vec!["link lengths must be positive".into()]));
        }
        Ok(Self {
            layout: BlockLayout::new(vec![1; 3], 2, vec![2; 3])?,
            lengths: params.link_lengths.map(T::lit),
            offsets: params.offsets.map(|b| b.map(T::lit)),
            params,
        })
    }

    pub fn params(&self) -> &PlanarTriLinkParams {
        &self.params
    }
}

impl<T: Scalar> Default for PlanarTriLink<T> {
    fn default() -> Self {
        Self::new(PlanarTriLinkParams::default()).expect("default parameters are valid")
    }
}

impl<T: Scalar> KinematicSystem<T> for PlanarTriLink<T> {
    fn name(&self) -> &str {
        "planar-tri-link"
    }

    fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    /// Load at the origin, each link pointing radially outward.
    fn reference_configuration(&self) -> DVector<T> {
        let mut q = DVector::zeros(5);
        for i in 0..3 {
            let [bx, by] = self.params.offsets[i];
            q[i] = T::lit(by.atan2(bx));
        }
        q
    }

    fn agent_position(&self, i: usize, q_i: &[T], q_load: &[T]) -> Result<DVector<T>> {
        let (phi, l, b) = (q_i[0], self.lengths[i], self.offsets[i]);
        Ok(DVector::from_vec(vec![
            q_load[0] + b[0] + l * phi.cos(),
            q_load[1] + b[1] + l * phi.sin(),
        ]))
    }

    fn agent_jacobian(&self, i: usize, q_i: &[T], _q_load: &[T]) -> Result<(DMatrix<T>, DMatrix<T>)> {
        let (phi, l) = (q_i[0], self.lengths[i]);
        Ok((
            DMatrix::from_column_slice(2, 1, &[-l * phi.sin(), l * phi.cos()]),
            DMatrix::identity(2, 2),
        ))
    }
}
