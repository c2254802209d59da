use nalgebra::DVector;

use super::{whole_steps, Trace};
use crate::controllers::{continuous_u, offline_step_u, online_step_u, AuxOptions, GainSchedule, Strategy};
use crate::error::{Error, Result};
use crate::model::Ball;
use crate::ode::rk4_step;
use crate::scalar::Scalar;
use crate::systems::{coriolis_matrix, jacobian_matrix, mass_matrix, DynamicParams, KinematicSystem};

/// Run-level settings for a second-order closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicSetup<T> {
    pub strategy: Strategy,
    /// Force gain; the damping force is `F = -alpha (A q' - u)`.
    pub alpha: T,
    pub t_end: T,
    pub dt: T,
}

/// A run of `M(q) q'' + C(q, q') q' = A_q^T F`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicRun<T: Scalar> {
    pub strategy: Strategy,
    pub alpha: T,
    /// `1 / alpha`, the boundary-layer time scale.
    pub epsilon: T,
    pub trace: Trace<T>,
    pub qdot: Vec<DVector<T>>,
    /// `||F||_2` at each grid point.
    pub force_norms: Vec<T>,
    pub sample_indices: Vec<usize>,
    /// Final error norm is at most this fraction of the initial one.
    pub converged: bool,
    /// Diagnostic with the state dump when the run stopped early because
    /// the configuration became singular or left the model's domain.
    pub aborted: Option<String>,
}

/// Fraction of the initial error a run must reach to count as converged.
pub const CONVERGENCE_RATIO: f64 = 1e-3;

struct Loop<'a, T: Scalar, S: KinematicSystem<T> + ?Sized> {
    sys: &'a S,
    params: &'a DynamicParams<T>,
    q_ref: &'a DVector<T>,
    alpha: T,
    m: usize,
}

impl<T: Scalar, S: KinematicSystem<T> + ?Sized> Loop<'_, T, S> {
    fn force(&self, q: &DVector<T>, v: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        let a = jacobian_matrix(self.sys, q)?;
        Ok((a * v - u) * -self.alpha)
    }

    /// `[q'; q'']` for the given input (held, or recomputed from `q` when `k_diag` is set).
    fn rhs(&self, x: &DVector<T>, held: &DVector<T>, k_diag: Option<&DVector<T>>) -> Result<DVector<T>> {
        let q = x.rows(0, self.m).into_owned();
        let v = x.rows(self.m, self.m).into_owned();
        let u = match k_diag {
            Some(k) => continuous_u(self.sys, &q, self.q_ref, k)?,
            None => held.clone(),
        };
        let a = jacobian_matrix(self.sys, &q)?;
        let f = (&a * &v - u) * -self.alpha;
        let mass = mass_matrix(self.sys, self.params, &q)?;
        let c = coriolis_matrix(self.sys, self.params, &q, &v)?;
        let rhs = a.transpose() * f - c * &v;
        let chol = mass.cholesky().ok_or_else(|| Error::NotPositiveDefinite {
            state: x.iter().map(|v| v.as_f64()).collect(),
        })?;
        let acc = chol.solve(&rhs);
        let mut out = DVector::zeros(2 * self.m);
        out.rows_mut(0, self.m).copy_from(&v);
        out.rows_mut(self.m, self.m).copy_from(&acc);
        Ok(out)
    }
}

/// RK4 integration of the force-driven loop with the continuous or sampled
/// input. Refuses to run unless `dt <= 1 / (10 alpha)`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_dynamic<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    params: &DynamicParams<T>,
    ball: &Ball<T>,
    q0: &DVector<T>,
    qdot0: &DVector<T>,
    schedule: &GainSchedule<T>,
    setup: &DynamicSetup<T>,
    opts: &AuxOptions,
) -> Result<DynamicRun<T>> {
    let m = sys.layout().m();
    if q0.len() != m || qdot0.len() != m {
        return Err(Error::dim(format!("initial state must have {m} positions and velocities")));
    }
    if !(setup.alpha > T::zero()) {
        return Err(Error::InvalidConfig(vec![format!("alpha must be positive, got {}", setup.alpha)]));
    }
    let epsilon = T::one() / setup.alpha;
    let limit = epsilon / T::lit(10.0);
    if setup.dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::Stiffness {
            dt: setup.dt.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let steps = whole_steps(setup.t_end, setup.dt, "dynamic run")?;
    let per_period = match setup.strategy {
        Strategy::Continuous => None,
        _ => Some(whole_steps(schedule.period, setup.dt, "sampling period")?.max(1)),
    };

    let lp = Loop {
        sys,
        params,
        q_ref: &ball.center,
        alpha: setup.alpha,
        m,
    };
    let k_cont = schedule.kbar.scaled(schedule.k);
    let mut x = DVector::zeros(2 * m);
    x.rows_mut(0, m).copy_from(q0);
    x.rows_mut(m, m).copy_from(qdot0);

    let mut run = DynamicRun {
        strategy: setup.strategy,
        alpha: setup.alpha,
        epsilon,
        trace: Trace::default(),
        qdot: Vec::with_capacity(steps + 1),
        force_norms: Vec::with_capacity(steps + 1),
        sample_indices: Vec::new(),
        converged: false,
        aborted: None,
    };
    let (mut k, mut held) = (schedule.k, DVector::zeros(sys.layout().n()));
    for j in 0..=steps {
        let t = T::lit(j as f64) * setup.dt;
        let q = x.rows(0, m).into_owned();
        let v = x.rows(m, m).into_owned();
        let outcome = (|| -> Result<Option<DVector<T>>> {
            if let Some(p) = per_period {
                if j % p == 0 {
                    (k, held) = match setup.strategy {
                        Strategy::Online => {
                            let s = online_step_u(sys, ball, &q, &schedule.kbar, schedule.period, schedule.k, opts)?;
                            (s.k, s.u)
                        }
                        _ => (schedule.k, offline_step_u(sys, &q, &ball.center, schedule.k, &schedule.kbar)?),
                    };
                }
            }
            let u = match per_period {
                None => continuous_u(sys, &q, &ball.center, &k_cont)?,
                Some(_) => held.clone(),
            };
            let force = lp.force(&q, &v, &u)?.norm();
            if per_period.is_some_and(|p| j % p == 0) {
                run.sample_indices.push(j);
            }
            run.force_norms.push(force);
            run.trace.push(ball, t, q.clone(), k);
            run.qdot.push(v.clone());
            if j == steps {
                return Ok(None);
            }
            let k_diag = per_period.is_none().then_some(&k_cont);
            rk4_step(&mut |s: &DVector<T>| lp.rhs(s, &held, k_diag), &x, setup.dt).map(Some)
        })();
        match outcome {
            Ok(Some(next)) => x = next,
            Ok(None) => break,
            Err(err @ (Error::Singular { .. } | Error::Domain(_) | Error::NotPositiveDefinite { .. })) if j > 0 => {
                run.aborted = Some(format!("t = {t}: {err}; state {:?}", x.as_slice()));
                break;
            }
            Err(err) => return Err(err),
        }
    }
    let n0 = run.trace.norms[0];
    run.converged = run.aborted.is_none() && run.trace.final_norm() <= T::lit(CONVERGENCE_RATIO) * n0;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::BlockGains;
    use crate::model::{NormKind, WeightedNorm};
    use crate::systems::{CoriolisMode, LinearTallSystem};
    use nalgebra::DMatrix;

    #[test]
    fn stiffness_limit_enforced() {
        let sys = LinearTallSystem::dense(DMatrix::from_row_slice(2, 1, &[1.0, 1.0])).unwrap();
        let params = DynamicParams::new(sys.layout(), vec![0.5], DMatrix::zeros(0, 0), CoriolisMode::Zero).unwrap();
        let ball = Ball::new(DVector::zeros(1), 1.0, WeightedNorm::unweighted(sys.layout(), NormKind::Two)).unwrap();
        let schedule = GainSchedule::new(BlockGains::identity(sys.layout()), 1.0, 1.0).unwrap();
        let setup = DynamicSetup {
            strategy: Strategy::Continuous,
            alpha: 100.0,
            t_end: 1.0,
            dt: 0.01,
        };
        let q0 = DVector::from_element(1, 0.5);
        let err = integrate_dynamic(&sys, &params, &ball, &q0, &DVector::zeros(1), &schedule, &setup, &AuxOptions::default());
        assert!(matches!(err, Err(Error::Stiffness { .. })));
        let ok = DynamicSetup { dt: 0.001, ..setup };
        let run = integrate_dynamic(&sys, &params, &ball, &q0, &DVector::zeros(1), &schedule, &ok, &AuxOptions::default()).unwrap();
        assert_eq!(run.trace.len(), 1001);
        assert!(run.trace.final_norm() < run.trace.norms[0]);
    }
}
