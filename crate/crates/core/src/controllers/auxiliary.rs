use nalgebra::DVector;

use super::BlockGains;
use crate::error::{Error, Result};
use crate::model::{Ball, NormKind, PseudoInverse};
use crate::ode::rk4_step;
use crate::scalar::Scalar;
use crate::search::{bisect_root, golden_section_min};
use crate::systems::{jacobian_matrix, KinematicSystem};

/// Integration settings for the auxiliary flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxOptions {
    /// Horizon is `horizon_factor / min_b(kbar_b / d_b^2)`.
    pub horizon_factor: f64,
    /// RK4 step as a fraction of the horizon.
    pub grid_fraction: f64,
    /// Absolute tolerance on `tau_o` and `tau_s`; `None` means
    /// `Scalar::SEARCH_TOL` times the horizon.
    pub tau_tol: Option<f64>,
}

impl Default for AuxOptions {
    fn default() -> Self {
        Self {
            horizon_factor: 3.0,
            grid_fraction: 1e-3,
            tau_tol: None,
        }
    }
}

/// Right-hand side `f(e') = -A^+_{q^r + e'} A_{q^r + e_h} K_bar e_h` of the
/// rescaled error flow started from `e_h`.
pub struct AuxFlow<'a, T: Scalar, S: KinematicSystem<T> + ?Sized> {
    sys: &'a S,
    q_ref: DVector<T>,
    e_h: DVector<T>,
    drive: DVector<T>,
}

impl<'a, T: Scalar, S: KinematicSystem<T> + ?Sized> AuxFlow<'a, T, S> {
    pub fn new(sys: &'a S, q_ref: &DVector<T>, e_h: &DVector<T>, kbar: &BlockGains<T>) -> Result<Self> {
        let a_h = jacobian_matrix(sys, &(q_ref + e_h))?;
        Ok(Self {
            sys,
            q_ref: q_ref.clone(),
            e_h: e_h.clone(),
            drive: a_h * e_h.component_mul(kbar.diag()),
        })
    }

    pub fn initial(&self) -> &DVector<T> {
        &self.e_h
    }

    /// `A_{q^r + e_h} K_bar e_h`, the held workspace command per unit gain.
    pub fn drive(&self) -> &DVector<T> {
        &self.drive
    }

    pub fn rhs(&self, e: &DVector<T>) -> Result<DVector<T>> {
        let a = jacobian_matrix(self.sys, &(&self.q_ref + e))?;
        Ok(-(PseudoInverse::compute(&a)?.matrix * &self.drive))
    }

    pub fn step(&self, e: &DVector<T>, h: T) -> Result<DVector<T>> {
        rk4_step(&mut |x: &DVector<T>| self.rhs(x), e, h)
    }
}

/// Sampled solution of the auxiliary flow with its event times.
#[derive(Debug, Clone)]
pub struct AuxTrajectory<T: Scalar> {
    pub e_h: DVector<T>,
    pub kind: NormKind,
    pub initial_norm: T,
    /// RK4 grid, starting at `tau = 0`; ends at the horizon, at `tau_s`, or
    /// at the last regular point before a singularity.
    pub taus: Vec<T>,
    pub states: Vec<DVector<T>>,
    pub norms: Vec<T>,
    pub step: T,
    pub horizon: T,
    /// First return to the initial norm; `None` stands for infinity.
    pub tau_s: Option<T>,
    /// Closest approach to the origin on `[0, tau_s]`.
    pub tau_o: T,
    pub e_at_tau_o: DVector<T>,
    pub min_norm: T,
    /// The Jacobian lost rank (or left its domain) along the flow.
    pub singular: bool,
}

impl<T: Scalar> AuxTrajectory<T> {
    /// Flow state at an arbitrary `tau` in the integrated range, by one RK4
    /// step from the preceding grid point.
    pub fn state_at<S: KinematicSystem<T> + ?Sized>(&self, flow: &AuxFlow<'_, T, S>, tau: T) -> Result<DVector<T>> {
        let last = *self.taus.last().expect("trajectory has at least one point");
        if tau < T::zero() || tau > last {
            return Err(Error::Numeric(format!("tau = {tau} outside integrated range [0, {last}]")));
        }
        let j = self.taus.partition_point(|&t| t <= tau).saturating_sub(1);
        let s = tau - self.taus[j];
        if s == T::zero() {
            return Ok(self.states[j].clone());
        }
        flow.step(&self.states[j], s)
    }
}

fn horizon<T: Scalar>(ball: &Ball<T>, kbar: &BlockGains<T>, factor: f64) -> T {
    let rate = kbar
        .gains()
        .iter()
        .zip(ball.norm.weights())
        .map(|(&k, &d)| k / (d * d))
        .fold(T::max_value().unwrap(), |acc, r| if r < acc { r } else { acc });
    T::lit(factor) / rate
}

/// Integrates the auxiliary flow from `e_h`, locating `tau_s` and `tau_o`.
pub fn simulate_auxiliary<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    e_h: &DVector<T>,
    kbar: &BlockGains<T>,
    opts: &AuxOptions,
) -> Result<AuxTrajectory<T>> {
    let q_h = &ball.center + e_h;
    if !ball.contains_within(&q_h, T::lit(1e-9)) {
        return Err(Error::Domain(format!(
            "initial error norm {} outside the ball of radius {}",
            ball.norm.norm(e_h),
            ball.radius
        )));
    }
    let flow = AuxFlow::new(sys, &ball.center, e_h, kbar)?;
    simulate_flow(&flow, ball, kbar, opts)
}

pub(crate) fn simulate_flow<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    flow: &AuxFlow<'_, T, S>,
    ball: &Ball<T>,
    kbar: &BlockGains<T>,
    opts: &AuxOptions,
) -> Result<AuxTrajectory<T>> {
    let norm = &ball.norm;
    let e_h = flow.initial().clone();
    let n0 = norm.norm(&e_h);
    let tau_max = horizon(ball, kbar, opts.horizon_factor);
    let steps = (1.0 / opts.grid_fraction).round().max(1.0) as usize;
    let dt = tau_max / T::lit(steps as f64);
    let tol = T::lit(opts.tau_tol.unwrap_or(T::SEARCH_TOL)) * tau_max.max(T::one());

    let mut traj = AuxTrajectory {
        e_h: e_h.clone(),
        kind: norm.kind(),
        initial_norm: n0,
        taus: vec![T::zero()],
        states: vec![e_h.clone()],
        norms: vec![n0],
        step: dt,
        horizon: tau_max,
        tau_s: None,
        tau_o: T::zero(),
        e_at_tau_o: e_h.clone(),
        min_norm: n0,
        singular: false,
    };
    if n0 == T::zero() {
        return Ok(traj);
    }

    // Extra terminal segment when the boundary is hit between grid points.
    let mut partial: Option<T> = None;
    for j in 1..=steps {
        let prev = traj.states.last().unwrap().clone();
        let next = match flow.step(&prev, dt) {
            Ok(x) => x,
            Err(Error::Singular { .. } | Error::Domain(_)) => {
                traj.singular = true;
                traj.tau_s = Some(*traj.taus.last().unwrap());
                break;
            }
            Err(e) => return Err(e),
        };
        let n = norm.norm(&next);
        if n >= n0 {
            let s = bisect_root(
                |s: T| -> Result<T> { Ok(norm.norm(&flow.step(&prev, s)?) - n0) },
                T::zero(),
                dt,
                tol,
            )
            .unwrap_or(dt);
            let t_prev = *traj.taus.last().unwrap();
            traj.tau_s = Some(t_prev + s);
            partial = Some(s);
            break;
        }
        traj.taus.push(T::lit(j as f64) * dt);
        traj.states.push(next);
        traj.norms.push(n);
    }

    // Coarse minimiser on the grid, then golden-section refinement over the
    // neighbouring interval(s) with single RK4 steps from the left bracket.
    let (jmin, _) = traj
        .norms
        .iter()
        .enumerate()
        .fold((0, traj.norms[0]), |(bj, bn), (j, &n)| if n < bn { (j, n) } else { (bj, bn) });
    let last = traj.taus.len() - 1;
    let left = jmin.saturating_sub(1);
    let right_extent = if jmin < last {
        traj.taus[jmin + 1] - traj.taus[left]
    } else {
        traj.taus[jmin] - traj.taus[left] + partial.unwrap_or(T::zero())
    };
    let start = traj.states[left].clone();
    let refined = golden_section_min(
        |s: T| -> Result<T> {
            if s == T::zero() {
                Ok(norm.norm(&start))
            } else {
                Ok(norm.norm(&flow.step(&start, s)?))
            }
        },
        T::zero(),
        right_extent,
        tol,
    );
    let (tau_o, e_o) = match refined {
        Ok(m) if m.value <= traj.norms[jmin] => {
            let e = if m.x == T::zero() { start.clone() } else { flow.step(&start, m.x)? };
            (traj.taus[left] + m.x, e)
        }
        // Refinement hit a singular point or did not improve: keep the grid minimiser.
        _ => (traj.taus[jmin], traj.states[jmin].clone()),
    };
    traj.min_norm = norm.norm(&e_o);
    traj.tau_o = tau_o;
    traj.e_at_tau_o = e_o;
    Ok(traj)
}
