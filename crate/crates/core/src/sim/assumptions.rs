use nalgebra::{DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controllers::{continuous_u, BlockGains};
use crate::error::{Error, Result};
use crate::model::{singular_value_range, Ball};
use crate::rng::{stream, Purpose};
use crate::scalar::Scalar;
use crate::systems::{jacobian_matrix, mass_matrix, DynamicParams, KinematicSystem};

/// Numerical evidence for the two-time-scale hypotheses over a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub samples: usize,
    /// States where the Jacobian or inertia could not be evaluated.
    pub failed_samples: usize,
    /// `||q''||` at `q = q^r`, `q' = 0`.
    pub equilibrium_residual: f64,
    pub equilibrium_ok: bool,
    /// Largest `||F||` with `q' = -K (q - q^r)`: the slow manifold is a root.
    pub root_residual: f64,
    /// Smallest `sigma_min(A) / sigma_max(A)`: the root is isolated.
    pub min_rank_margin: f64,
    pub root_ok: bool,
    /// Largest `||A||_2` and `||M^-1||_2` seen.
    pub max_jacobian_norm: f64,
    pub max_inverse_inertia: f64,
    pub bounded_ok: bool,
    /// Smallest diagonal entry of `K`.
    pub reduced_rate: f64,
    pub reduced_ok: bool,
    /// Smallest eigenvalue of `M^-1 A^T A` seen.
    pub hurwitz_margin: f64,
    pub hurwitz_ok: bool,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.equilibrium_ok && self.root_ok && self.bounded_ok && self.reduced_ok && self.hurwitz_ok
    }
}

struct Sample {
    root: f64,
    rank: f64,
    a_norm: f64,
    m_inv: f64,
    hurwitz: f64,
}

fn sample_state<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    params: &DynamicParams<T>,
    ball: &Ball<T>,
    k_diag: &DVector<T>,
    q: &DVector<T>,
) -> Result<Sample> {
    let a = jacobian_matrix(sys, q)?;
    let (lo, hi) = singular_value_range(&a);
    let mass = mass_matrix(sys, params, q)?;
    let chol = mass.clone().cholesky().ok_or_else(|| Error::NotPositiveDefinite {
        state: q.iter().map(|v| v.as_f64()).collect(),
    })?;
    // Eigenvalues of M^-1 A^T A equal those of L^-1 A^T A L^-T.
    let l = chol.l();
    let ata = a.transpose() * &a;
    let left = l.solve_lower_triangular(&ata).ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    let sym = l
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    let sym = (&sym + sym.transpose()) * T::lit(0.5);
    let hurwitz = SymmetricEigen::new(sym).eigenvalues.min();
    let m_inv = SymmetricEigen::new(mass).eigenvalues.min();

    let u = continuous_u(sys, q, &ball.center, k_diag)?;
    let v_slow = -(q - &ball.center).component_mul(k_diag);
    let root = (&a * v_slow - u).norm();
    Ok(Sample {
        root: root.as_f64(),
        rank: (lo / hi).as_f64(),
        a_norm: hi.as_f64(),
        m_inv: 1.0 / m_inv.as_f64(),
        hurwitz: hurwitz.as_f64(),
    })
}

/// Samples the ball uniformly and evaluates each hypothesis; never fails on
/// a bad margin, only reports it. `k` scales `kbar`; `k <= 0` makes the
/// reduced-system check fail.
pub fn check_sp_assumptions<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    params: &DynamicParams<T>,
    ball: &Ball<T>,
    k: T,
    kbar: &BlockGains<T>,
    n_samples: usize,
    seed: u64,
) -> AssumptionReport {
    let k_diag = kbar.scaled(k);
    let reduced_rate = k_diag.min().as_f64();

    // At the reference with zero velocity both u and the force vanish.
    let equilibrium_residual = continuous_u(sys, &ball.center, &ball.center, &k_diag)
        .map(|u| u.norm().as_f64())
        .unwrap_or(f64::INFINITY);

    let results: Vec<Option<Sample>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::Assumptions, i as u64);
            let q = ball.sample_point(&mut rng);
            sample_state(sys, params, ball, &k_diag, &q).ok()
        })
        .collect();
    let failed_samples = results.iter().filter(|s| s.is_none()).count();
    let ok: Vec<Sample> = results.into_iter().flatten().collect();
    let fold_max = |f: fn(&Sample) -> f64| ok.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let fold_min = |f: fn(&Sample) -> f64| ok.iter().map(f).fold(f64::INFINITY, f64::min);
    let root_residual = fold_max(|s| s.root);
    let min_rank_margin = fold_min(|s| s.rank);
    let max_jacobian_norm = fold_max(|s| s.a_norm);
    let max_inverse_inertia = fold_max(|s| s.m_inv);
    let hurwitz_margin = fold_min(|s| s.hurwitz);
    let any = !ok.is_empty() && failed_samples == 0;
    AssumptionReport {
        samples: n_samples,
        failed_samples,
        equilibrium_residual,
        equilibrium_ok: equilibrium_residual <= 1e-12,
        root_residual,
        min_rank_margin,
        root_ok: any && root_residual <= 1e-9 * (1.0 + max_jacobian_norm) && min_rank_margin > 1e-8,
        max_jacobian_norm,
        max_inverse_inertia,
        bounded_ok: any && max_jacobian_norm.is_finite() && max_inverse_inertia.is_finite(),
        reduced_rate,
        reduced_ok: reduced_rate > 0.0,
        hurwitz_margin,
        hurwitz_ok: any && hurwitz_margin > 0.0,
    }
}
