use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::auxiliary::{simulate_flow, AuxFlow, AuxOptions};
use super::BlockGains;
use crate::error::{Error, Result};
use crate::model::{Ball, PseudoInverse};
use crate::rng::{stream, Purpose};
use crate::scalar::{fd_step, Scalar};
use crate::systems::{jacobian_matrix, KinematicSystem};

/// Sampled maxima are multiplied by this factor before use as bounds.
pub const SAFETY_FACTOR: f64 = 1.1;

/// Smallest `tau` used when forming `||d'(tau)|| / (||e_h|| tau^2)`.
pub const MU_STAR_TAU_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbEstimate<T> {
    /// Inflated bounds.
    pub a: T,
    pub b: T,
    /// Raw sampled maxima.
    pub a_max: T,
    pub b_max: T,
    pub samples: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuStarEstimate<T> {
    pub mu_star: T,
    pub trajectories: usize,
    pub rejected: usize,
}

/// Constants behind the offline design for one ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants<T> {
    pub a: T,
    pub b: T,
    pub radius: T,
    pub mu: T,
    pub mu_star: T,
    pub ab_samples: usize,
    pub mu_star_trajectories: usize,
    pub seed: u64,
}

/// `mu = a b R / 2`.
pub fn mu_from_ab<T: Scalar>(a: T, b: T, radius: T) -> T {
    T::lit(0.5) * a * b * radius
}

fn max2<T: Scalar>(x: (T, T), y: (T, T)) -> (T, T) {
    (if y.0 > x.0 { y.0 } else { x.0 }, if y.1 > x.1 { y.1 } else { x.1 })
}

/// One `(e, e')` pair: `||A^+_{e'} A_e K_bar||` and `||df/de'|| / ||e||`.
fn ab_sample<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    kbar: &BlockGains<T>,
    e: &DVector<T>,
    e_prime: &DVector<T>,
) -> Result<(T, Option<T>)> {
    let norm = &ball.norm;
    let a_e = jacobian_matrix(sys, &(&ball.center + e))?;
    let pinv = PseudoInverse::compute(&jacobian_matrix(sys, &(&ball.center + e_prime))?)?.matrix;
    let mut p = &pinv * &a_e;
    for (j, &k) in kbar.diag().iter().enumerate() {
        p.column_mut(j).scale_mut(k);
    }
    let a = norm.induced_norm(&p);

    let ne = norm.norm(e);
    if ne <= T::lit(1e-12) * ball.radius {
        return Ok((a, None));
    }
    let drive = a_e * e.component_mul(kbar.diag());
    let f = |x: &DVector<T>| -> Result<DVector<T>> {
        let a = jacobian_matrix(sys, &(&ball.center + x))?;
        Ok(-(PseudoInverse::compute(&a)?.matrix * &drive))
    };
    let m = e_prime.len();
    let mut jac = DMatrix::zeros(m, m);
    for k in 0..m {
        let h = fd_step(e_prime[k] + ball.center[k]);
        let mut xp = e_prime.clone();
        let mut xm = e_prime.clone();
        xp[k] += h;
        xm[k] -= h;
        jac.column_mut(k).copy_from(&((f(&xp)? - f(&xm)?) / (h + h)));
    }
    Ok((a, Some(norm.induced_norm(&jac) / ne)))
}

/// Monte-Carlo estimate of the constants `a` and `b` over uniformly sampled
/// pairs in the ball. Sample `i` always uses stream `i`, so estimates grow
/// monotonically with `n_samples`.
pub fn estimate_ab<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    kbar: &BlockGains<T>,
    n_samples: usize,
    seed: u64,
) -> Result<AbEstimate<T>> {
    if n_samples == 0 {
        return Err(Error::InvalidConfig(vec!["estimate_ab needs at least one sample".into()]));
    }
    let results: Vec<Result<Option<(T, T)>>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::AbBounds, i as u64);
            let e = ball.sample_offset(&mut rng);
            let e_prime = ball.sample_offset(&mut rng);
            match ab_sample(sys, ball, kbar, &e, &e_prime) {
                Ok((a, b)) => Ok(Some((a, b.unwrap_or(T::zero())))),
                Err(Error::Singular { .. } | Error::Domain(_)) => Ok(None),
                Err(err) => Err(err),
            }
        })
        .collect();
    let mut skipped = 0;
    let mut best = (T::zero(), T::zero());
    for r in results {
        match r? {
            Some(ab) => best = max2(best, ab),
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        warn!("estimate_ab: skipped {skipped} of {n_samples} singular samples");
    }
    if skipped == n_samples {
        return Err(Error::Numeric("estimate_ab: every sample was singular".into()));
    }
    let safety = T::lit(SAFETY_FACTOR);
    Ok(AbEstimate {
        a: best.0 * safety,
        b: best.1 * safety,
        a_max: best.0,
        b_max: best.1,
        samples: n_samples,
        skipped,
    })
}

/// Monte-Carlo refinement of the remainder constant:
/// `max ||e'(tau) - (I - tau K_bar) e_h|| / (||e_h|| tau^2)` over sampled
/// trajectories and grid times `tau_floor <= tau < tau_s`.
pub fn mc_mu_star<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    ball: &Ball<T>,
    kbar: &BlockGains<T>,
    n_traj: usize,
    seed: u64,
    opts: &AuxOptions,
) -> Result<MuStarEstimate<T>> {
    if n_traj == 0 {
        return Err(Error::InvalidConfig(vec!["mc_mu_star needs at least one trajectory".into()]));
    }
    let floor = T::lit(MU_STAR_TAU_FLOOR);
    let results: Vec<Result<Option<T>>> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::MuStar, i as u64);
            let e_h = ball.sample_offset(&mut rng);
            let n0 = ball.norm.norm(&e_h);
            if n0 == T::zero() {
                return Ok(None);
            }
            let flow = match AuxFlow::new(sys, &ball.center, &e_h, kbar) {
                Ok(f) => f,
                Err(Error::Singular { .. } | Error::Domain(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let traj = simulate_flow(&flow, ball, kbar, opts)?;
            let mut worst = T::zero();
            for (tau, e) in traj.taus.iter().zip(&traj.states) {
                if *tau < floor || traj.tau_s.is_some_and(|ts| *tau >= ts) {
                    continue;
                }
                let linear = &e_h - e_h.component_mul(kbar.diag()) * *tau;
                let ratio = ball.norm.norm(&(e - linear)) / (n0 * *tau * *tau);
                if ratio > worst {
                    worst = ratio;
                }
            }
            Ok(Some(worst))
        })
        .collect();
    let mut rejected = 0;
    let mut mu_star = T::zero();
    for r in results {
        match r? {
            Some(v) if v > mu_star => mu_star = v,
            Some(_) => {}
            None => rejected += 1,
        }
    }
    Ok(MuStarEstimate {
        mu_star,
        trajectories: n_traj,
        rejected,
    })
}
