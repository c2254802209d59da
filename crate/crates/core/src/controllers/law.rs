use nalgebra::{DMatrix, DVector};

use super::BlockGains;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::systems::KinematicSystem;

/// Row-by-row product accumulated left to right over columns.
fn accumulate_rows<T: Scalar>(a: &DMatrix<T>, v: &DVector<T>, out: &mut [T]) {
    for (r, slot) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for j in 0..a.ncols() {
            acc += a[(r, j)] * v[j];
        }
        *slot = acc;
    }
}

/// `u = -A_q K (q - q^r)` with `K` given by its diagonal.
pub fn continuous_u<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    q: &DVector<T>,
    q_ref: &DVector<T>,
    k_diag: &DVector<T>,
) -> Result<DVector<T>> {
    if q_ref.len() != sys.layout().m() {
        return Err(Error::dim("reference length does not match layout"));
    }
    error_feedback_u(sys, q, &(q - q_ref), k_diag)
}

/// `u = -A_q K e` with the error supplied separately, so that callers
/// tracking `e` directly keep its relative precision near the reference.
pub fn error_feedback_u<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    q: &DVector<T>,
    e: &DVector<T>,
    k_diag: &DVector<T>,
) -> Result<DVector<T>> {
    let layout = sys.layout();
    if e.len() != layout.m() || k_diag.len() != layout.m() {
        return Err(Error::dim("error or gain length does not match layout"));
    }
    let a = sys.jacobian(q)?;
    let v = e.component_mul(k_diag);
    let mut u = DVector::zeros(layout.n());
    accumulate_rows(a.dense(), &v, u.as_mut_slice());
    Ok(-u)
}

/// Agent-local form of [`continuous_u`]:
/// `u_i = -A^(i)_{q_i} K_i (q_i - q_i^r) - A^(i)_{q_L} K_L (q_L - q_L^r)`,
/// using only `(q_i, q_L)` and the two block gains.
#[allow(clippy::too_many_arguments)]
pub fn continuous_u_agent<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    i: usize,
    q_i: &[T],
    q_load: &[T],
    q_ref_i: &[T],
    q_ref_load: &[T],
    k_i: T,
    k_load: T,
) -> Result<DVector<T>> {
    let (diag, load) = sys.agent_jacobian(i, q_i, q_load)?;
    let vi: Vec<T> = q_i.iter().zip(q_ref_i).map(|(&x, &r)| k_i * (x - r)).collect();
    let vl: Vec<T> = q_load.iter().zip(q_ref_load).map(|(&x, &r)| k_load * (x - r)).collect();
    let mut u = DVector::zeros(diag.nrows());
    for r in 0..diag.nrows() {
        let mut acc = T::zero();
        for (j, &x) in vi.iter().enumerate() {
            acc += diag[(r, j)] * x;
        }
        for (j, &x) in vl.iter().enumerate() {
            acc += load[(r, j)] * x;
        }
        u[r] = -acc;
    }
    Ok(u)
}

/// Held input `u_h = -k A_{q_h} K_bar (q_h - q^r)` for one sampling period.
pub fn offline_step_u<T: Scalar, S: KinematicSystem<T> + ?Sized>(
    sys: &S,
    q_h: &DVector<T>,
    q_ref: &DVector<T>,
    k: T,
    kbar: &BlockGains<T>,
) -> Result<DVector<T>> {
    continuous_u(sys, q_h, q_ref, &kbar.scaled(k))
}
