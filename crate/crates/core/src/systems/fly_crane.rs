use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::KinematicSystem;
use crate::error::{Error, Result};
use crate::model::{BlockLayout, WeightedNorm};
use crate::scalar::Scalar;

/// Index of the pitch angle inside `q` (agents first, then `x, y, z, roll, pitch, yaw`).
const PITCH_INDEX: usize = 4 + 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlyCraneParams {
    pub cable_lengths: [f64; 4],
    /// Cable attachment points in the load frame.
    pub attachments: [[f64; 3]; 4],
    /// Horizontal unit vectors spanning each cable plane together with `z`.
    pub plane_axes: [[f64; 3]; 4],
}

impl Default for FlyCraneParams {
    /// 1 m cables at the corners of a 0.8 m square, cable planes along the
    /// outward diagonals.
    fn default() -> Self {
        let corners = [[0.4, 0.4, 0.0], [-0.4, 0.4, 0.0], [-0.4, -0.4, 0.0], [0.4, -0.4, 0.0]];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            cable_lengths: [1.0; 4],
            attachments: corners,
            plane_axes: corners.map(|[x, y, _]| [x.signum() * s, y.signum() * s, 0.0]),
        }
    }
}

/// Four aerial robots carrying a rigid load on taut cables.
///
/// `q = (alpha_1..alpha_4, x, y, z, roll, pitch, yaw)` with cable elevation
/// angles `alpha_i in (0, pi)` and ZYX Euler angles, `R = Rz(yaw) Ry(pitch) Rx(roll)`.
/// Agent `i` sits at `xi + R (b_i + l_i (cos alpha_i u_i + sin alpha_i e_z))`.
#[derive(Debug, Clone)]
pub struct FlyCrane4<T: Scalar> {
    layout: BlockLayout,
    lengths: [T; 4],
    attachments: [Vector3<T>; 4],
    axes: [Vector3<T>; 4],
    params: FlyCraneParams,
}

impl<T: Scalar> FlyCrane4<T> {
    /// Pitch magnitude beyond which the working ball is considered too close
    /// to the Euler singularity.
    pub const MAX_PITCH: f64 = 1.2;

    pub fn new(params: FlyCraneParams) -> Result<Self> {
        let mut problems = Vec::new();
        if params.cable_lengths.iter().any(|&l| !(l > 0.0)) {
            problems.push("cable lengths must be positive".to_string());
        }
        for (i, u) in params.plane_axes.iter().enumerate() {
            let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            if (norm - 1.0).abs() > 1e-9 || u[2] != 0.0 {
                problems.push(format!("plane axis {i} must be a horizontal unit vector"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidConfig(problems));
        }
        let v = |a: [f64; 3]| Vector3::new(T::lit(a[0]), T::lit(a[1]), T::lit(a[2]));
        Ok(Self {
            layout: BlockLayout::new(vec![1; 4], 6, vec![3; 4])?,
            lengths: params.cable_lengths.map(T::lit),
            attachments: params.attachments.map(v),
            axes: params.plane_axes.map(v),
            params,
        })
    }

    pub fn params(&self) -> &FlyCraneParams {
        &self.params
    }

    /// Largest radius for which every point of a ball around `q_ref` keeps
    /// `|pitch| <= MAX_PITCH`.
    pub fn pitch_limited_radius(norm: &WeightedNorm<T>, q_ref: &DVector<T>) -> T {
        let margin = T::lit(Self::MAX_PITCH) - q_ref[PITCH_INDEX].abs();
        margin * norm.scale()[PITCH_INDEX]
    }

    fn cable_point(&self, i: usize, alpha: T) -> Vector3<T> {
        let l = self.lengths[i];
        self.attachments[i] + (self.axes[i] * alpha.cos() + Vector3::z() * alpha.sin()) * l
    }

    fn check_alpha(i: usize, alpha: T) -> Result<()> {
        if alpha > T::zero() && alpha < T::pi() {
            Ok(())
        } else {
            Err(Error::Domain(format!("cable angle alpha_{} = {alpha} outside (0, pi)", i + 1)))
        }
    }
}

impl<T: Scalar> Default for FlyCrane4<T> {
    fn default() -> Self {
        Self::new(FlyCraneParams::default()).expect("default parameters are valid")
    }
}

fn rot_x<T: Scalar>(a: T) -> (Matrix3<T>, Matrix3<T>) {
    let (s, c) = a.sin_cos();
    let (o, l) = (T::zero(), T::one());
    (
        Matrix3::new(l, o, o, o, c, -s, o, s, c),
        Matrix3::new(o, o, o, o, -s, -c, o, c, -s),
    )
}

fn rot_y<T: Scalar>(a: T) -> (Matrix3<T>, Matrix3<T>) {
    let (s, c) = a.sin_cos();
    let (o, l) = (T::zero(), T::one());
    (
        Matrix3::new(c, o, s, o, l, o, -s, o, c),
        Matrix3::new(-s, o, c, o, o, o, -c, o, -s),
    )
}

fn rot_z<T: Scalar>(a: T) -> (Matrix3<T>, Matrix3<T>) {
    let (s, c) = a.sin_cos();
    let (o, l) = (T::zero(), T::one());
    (
        Matrix3::new(c, -s, o, s, c, o, o, o, l),
        Matrix3::new(-s, -c, o, c, -s, o, o, o, o),
    )
}

impl<T: Scalar> KinematicSystem<T> for FlyCrane4<T> {
    fn name(&self) -> &str {
        "fly-crane-4"
    }

    fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    /// Cables at 60 degrees elevation, load level at the origin.
    fn reference_configuration(&self) -> DVector<T> {
        let mut q = DVector::zeros(10);
        q.rows_mut(0, 4).fill(T::frac_pi_3());
        q
    }

    fn agent_position(&self, i: usize, q_i: &[T], q_load: &[T]) -> Result<DVector<T>> {
        Self::check_alpha(i, q_i[0])?;
        let xi = Vector3::new(q_load[0], q_load[1], q_load[2]);
        let r = rot_z(q_load[5]).0 * rot_y(q_load[4]).0 * rot_x(q_load[3]).0;
        let p = xi + r * self.cable_point(i, q_i[0]);
        Ok(DVector::from_column_slice(p.as_slice()))
    }

    fn agent_jacobian(&self, i: usize, q_i: &[T], q_load: &[T]) -> Result<(DMatrix<T>, DMatrix<T>)> {
        let alpha = q_i[0];
        Self::check_alpha(i, alpha)?;
        let (rx, drx) = rot_x(q_load[3]);
        let (ry, dry) = rot_y(q_load[4]);
        let (rz, drz) = rot_z(q_load[5]);
        let r = rz * ry * rx;
        let w = self.cable_point(i, alpha);
        let (s, c) = alpha.sin_cos();
        let d_alpha = r * (self.axes[i] * (-s) + Vector3::z() * c) * self.lengths[i];

        let mut load = DMatrix::zeros(3, 6);
        load.view_mut((0, 0), (3, 3)).fill_with_identity();
        load.column_mut(3).copy_from(&(rz * ry * drx * w));
        load.column_mut(4).copy_from(&(rz * dry * rx * w));
        load.column_mut(5).copy_from(&(drz * ry * rx * w));
        Ok((DMatrix::from_column_slice(3, 1, d_alpha.as_slice()), load))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn vertical_cable_geometry() {
        let mut params = FlyCraneParams::default();
        params.attachments[0] = [1.0, 0.0, 0.0];
        params.plane_axes[0] = [1.0, 0.0, 0.0];
        let sys = FlyCrane4::<f64>::new(params).unwrap();
        let mut q = sys.reference_configuration();
        q[0] = FRAC_PI_2;
        let p = sys.forward_kinematics(&q).unwrap();
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(p[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn layout_and_reference_rank() {
        let sys = FlyCrane4::<f64>::default();
        assert_eq!((sys.layout().n(), sys.layout().m()), (12, 10));
        let a = sys.jacobian(&sys.reference_configuration()).unwrap();
        assert!(crate::model::min_singular_value(a.dense()) > 1e-2);
    }

    #[test]
    fn angle_domain_enforced() {
        let sys = FlyCrane4::<f64>::default();
        let mut q = sys.reference_configuration();
        q[2] = 0.0;
        assert!(matches!(sys.forward_kinematics(&q), Err(Error::Domain(_))));
        q[2] = 3.5;
        assert!(matches!(sys.jacobian(&q), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_axes_rejected() {
        let mut params = FlyCraneParams::default();
        params.plane_axes[1] = [1.0, 1.0, 0.0];
        assert!(FlyCrane4::<f64>::new(params).is_err());
    }
}
