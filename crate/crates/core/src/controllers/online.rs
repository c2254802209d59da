use log::warn;
use nalgebra::DVector;

use super::auxiliary::{simulate_flow, AuxFlow, AuxOptions};
use super::law::error_feedback_u;
use super::BlockGains;
use crate::error::{Error, Result};
use crate::model::Ball;
use crate::scalar::Scalar;
use crate::systems::KinematicSystem;

/// One online decision: the held input and the gain it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineStep<T: Scalar> {
    pub u: DVector<T>,
    pub k: T,
    /// Closest-approach time of the predicted flow (zero on fallback).
    pub tau_o: T,
    /// The rollout failed and the offline gain was used instead.
    pub fell_back: bool,
}

/// Predictive gain `k_h = tau_o(e_h) / T`: rolls the auxiliary flow forward
/// from the current error and picks the gain that lands the held input on
/// its closest approach at the end of the period.
pub fn online_step_u<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    q_h: &DVector<T>,
    kbar: &BlockGains<T>,
    period: T,
    fallback_k: T,
    opts: &AuxOptions,
) -> Result<OnlineStep<T>> {
    online_step_from_error(sys, ball, &(q_h - &ball.center), kbar, period, fallback_k, opts)
}

/// [`online_step_u`] with the current error `e_h = q_h - q^r` given directly.
pub fn online_step_from_error<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    e_h: &DVector<T>,
    kbar: &BlockGains<T>,
    period: T,
    fallback_k: T,
    opts: &AuxOptions,
) -> Result<OnlineStep<T>> {
    if e_h.iter().all(|x| *x == T::zero()) {
        return Ok(OnlineStep {
            u: DVector::zeros(sys.layout().n()),
            k: T::zero(),
            tau_o: T::zero(),
            fell_back: false,
        });
    }
    let rollout = AuxFlow::new(sys, &ball.center, e_h, kbar).and_then(|flow| simulate_flow(&flow, ball, kbar, opts));
    let (k, tau_o, fell_back) = match rollout {
        Ok(traj) if traj.tau_o > T::zero() => (traj.tau_o / period, traj.tau_o, false),
        Ok(_) => {
            warn!("online rollout found no decrease; using offline gain {fallback_k}");
            (fallback_k, T::zero(), true)
        }
        Err(err @ (Error::Singular { .. } | Error::Domain(_))) => {
            warn!("online rollout failed ({err}); using offline gain {fallback_k}");
            (fallback_k, T::zero(), true)
        }
        Err(err) => return Err(err),
    };
    Ok(OnlineStep {
        u: error_feedback_u(sys, &(&ball.center + e_h), e_h, &kbar.scaled(k))?,
        k,
        tau_o,
        fell_back,
    })
}
