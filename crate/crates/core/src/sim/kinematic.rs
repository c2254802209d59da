use nalgebra::DVector;

use super::{ball_exit, whole_steps, Trace, BALL_EXIT_TOL};
use crate::controllers::{error_feedback_u, online_step_from_error, AuxOptions, BlockGains, GainSchedule, Strategy};
use crate::error::{Error, Result};
use crate::model::{Ball, PseudoInverse};
use crate::ode::rk4_step;
use crate::scalar::Scalar;
use crate::systems::{jacobian_matrix, KinematicSystem};

/// A closed-loop run of `q' = A^+_q u`.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicRun<T: Scalar> {
    pub strategy: Strategy,
    pub trace: Trace<T>,
    /// Grid indices of the sampling instants `hT` (empty when continuous).
    pub sample_indices: Vec<usize>,
    /// Gain used on each sampling interval.
    pub step_gains: Vec<T>,
    /// Intervals where the online rollout fell back to the offline gain.
    pub fallbacks: usize,
}

impl<T: Scalar> KinematicRun<T> {
    /// `||e(hT)||` at each sampling instant.
    pub fn sampled_norms(&self) -> Vec<T> {
        self.sample_indices.iter().map(|&i| self.trace.norms[i]).collect()
    }
}

fn check_start<T: Scalar>(ball: &Ball<T>, q0: &DVector<T>) -> Result<()> {
    if q0.len() != ball.center.len() {
        return Err(Error::dim(format!("q0 has {} entries, expected {}", q0.len(), ball.center.len())));
    }
    if !ball.contains_within(q0, T::lit(BALL_EXIT_TOL)) {
        return Err(ball_exit(ball, T::zero(), q0));
    }
    Ok(())
}

fn velocity<T: Scalar, S: KinematicSystem<T> + ?Sized>(sys: &S, q: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
    Ok(PseudoInverse::compute(&jacobian_matrix(sys, q)?)?.matrix * u)
}

// Both loops integrate the error `e = q - q^r` rather than `q`: round-off then
// scales with `||e||` instead of `||q||`, which keeps fast (quadratic) decay
// resolvable well below 1e-14.

fn exit_check<T: Scalar>(ball: &Ball<T>, t: T, e: &DVector<T>) -> Result<()> {
    if ball.norm.norm(e) > ball.radius * (T::one() + T::lit(BALL_EXIT_TOL)) {
        return Err(ball_exit(ball, t, &(&ball.center + e)));
    }
    Ok(())
}

/// RK4 integration of `q' = A^+_q u(q)` with `u = -A_q K (q - q^r)` and
/// `K = k K_bar`.
pub fn integrate_kinematic_continuous<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    q0: &DVector<T>,
    k: T,
    kbar: &BlockGains<T>,
    t_end: T,
    dt: T,
) -> Result<KinematicRun<T>> {
    check_start(ball, q0)?;
    let steps = whole_steps(t_end, dt, "continuous run")?;
    let k_diag = kbar.scaled(k);
    let mut rhs = |e: &DVector<T>| {
        let q = &ball.center + e;
        velocity(sys, &q, &error_feedback_u(sys, &q, e, &k_diag)?)
    };
    let mut trace = Trace::default();
    let mut e = q0 - &ball.center;
    trace.push_error(ball, T::zero(), &e, k);
    for j in 1..=steps {
        e = rk4_step(&mut rhs, &e, dt)?;
        let t = T::lit(j as f64) * dt;
        exit_check(ball, t, &e)?;
        trace.push_error(ball, t, &e, k);
    }
    Ok(KinematicRun {
        strategy: Strategy::Continuous,
        trace,
        sample_indices: Vec::new(),
        step_gains: Vec::new(),
        fallbacks: 0,
    })
}

/// Sampled loop: at each `hT` the chosen strategy fixes `k`, the input
/// `u_h = -k A_{q_h} K_bar e_h` is held, and `q' = A^+_q u_h` is integrated
/// until the next sample. `dt` must divide both `T` and `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_kinematic_sampled<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    q0: &DVector<T>,
    schedule: &GainSchedule<T>,
    strategy: Strategy,
    t_end: T,
    dt: T,
    opts: &AuxOptions,
) -> Result<KinematicRun<T>> {
    if strategy == Strategy::Continuous {
        return integrate_kinematic_continuous(sys, ball, q0, schedule.k, &schedule.kbar, t_end, dt);
    }
    check_start(ball, q0)?;
    let per_period = whole_steps(schedule.period, dt, "sampling period")?;
    let steps = whole_steps(t_end, dt, "sampled run")?;
    if per_period == 0 {
        return Err(Error::InvalidConfig(vec!["sampling period is shorter than dt".into()]));
    }

    let mut trace = Trace::default();
    let mut run = KinematicRun {
        strategy,
        trace: Trace::default(),
        sample_indices: Vec::new(),
        step_gains: Vec::new(),
        fallbacks: 0,
    };
    let mut e = q0 - &ball.center;
    let (mut k, mut u) = (schedule.k, DVector::zeros(sys.layout().n()));
    for j in 0..=steps {
        let t = T::lit(j as f64) * dt;
        if j % per_period == 0 && j < steps {
            (k, u) = match strategy {
                Strategy::Online => {
                    let step = online_step_from_error(sys, ball, &e, &schedule.kbar, schedule.period, schedule.k, opts)?;
                    run.fallbacks += usize::from(step.fell_back);
                    (step.k, step.u)
                }
                _ => (schedule.k, error_feedback_u(sys, &(&ball.center + &e), &e, &schedule.kbar.scaled(schedule.k))?),
            };
            run.sample_indices.push(j);
            run.step_gains.push(k);
        } else if j % per_period == 0 {
            run.sample_indices.push(j);
        }
        trace.push_error(ball, t, &e, k);
        if j == steps {
            break;
        }
        e = rk4_step(&mut |x: &DVector<T>| velocity(sys, &(&ball.center + x), &u), &e, dt)?;
        exit_check(ball, t + dt, &e)?;
    }
    run.trace = trace;
    Ok(run)
}
