//! Closed-loop integrators: the kinematic loop under the continuous or
//! sampled laws, the second-order loop driven through a damping force, and
//! numerical checks of the two-time-scale hypotheses.

mod assumptions;
mod csv;
mod dynamic;
mod kinematic;

use nalgebra::DVector;

pub use assumptions::{check_sp_assumptions, AssumptionReport};
pub use csv::{format_number, write_csv, CSV_HEADER_PREFIX};
pub use dynamic::{integrate_dynamic, DynamicRun, DynamicSetup};
pub use kinematic::{integrate_kinematic_continuous, integrate_kinematic_sampled, KinematicRun};

use crate::error::{Error, Result};
use crate::model::Ball;
use crate::scalar::Scalar;

/// Relative slack before a trajectory is declared to have left the ball.
pub const BALL_EXIT_TOL: f64 = 1e-9;

/// Time series shared by every run type.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T: Scalar> {
    pub times: Vec<T>,
    pub q: Vec<DVector<T>>,
    pub norms: Vec<T>,
    pub in_ball: Vec<bool>,
    /// Scalar gain in force at each grid point.
    pub gains: Vec<T>,
}

impl<T: Scalar> Default for Trace<T> {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            q: Vec::new(),
            norms: Vec::new(),
            in_ball: Vec::new(),
            gains: Vec::new(),
        }
    }
}

impl<T: Scalar> Trace<T> {
    fn push(&mut self, ball: &Ball<T>, t: T, q: DVector<T>, k: T) {
        let n = ball.error_norm(&q);
        self.record(ball, t, q, n, k);
    }

    /// Records `q^r + e` with the norm taken from `e` itself.
    fn push_error(&mut self, ball: &Ball<T>, t: T, e: &DVector<T>, k: T) {
        let n = ball.norm.norm(e);
        self.record(ball, t, &ball.center + e, n, k);
    }

    fn record(&mut self, ball: &Ball<T>, t: T, q: DVector<T>, n: T, k: T) {
        self.times.push(t);
        self.in_ball.push(n <= ball.radius * (T::one() + T::lit(BALL_EXIT_TOL)));
        self.norms.push(n);
        self.q.push(q);
        self.gains.push(k);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_norm(&self) -> T {
        *self.norms.last().expect("trace is never empty")
    }
}

/// Number of `dt` steps in `span`, which must be a whole multiple.
fn whole_steps<T: Scalar>(span: T, dt: T, what: &str) -> Result<usize> {
    if !(dt > T::zero()) || !(span >= T::zero()) {
        return Err(Error::InvalidConfig(vec![format!("{what}: need dt > 0 and a non-negative span")]));
    }
    let ratio = (span / dt).as_f64();
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidConfig(vec![format!(
            "{what}: dt = {dt} does not divide {span} (ratio {ratio})"
        )]));
    }
    Ok(n as usize)
}

fn ball_exit<T: Scalar>(ball: &Ball<T>, t: T, q: &DVector<T>) -> Error {
    Error::BallExit {
        t: t.as_f64(),
        norm: ball.error_norm(q).as_f64(),
        radius: ball.radius.as_f64(),
    }
}
