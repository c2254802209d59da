use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A tall matrix is treated as rank deficient when `sigma_min < RANK_TOLERANCE * sigma_max`.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Moore-Penrose inverse of a tall full-column-rank matrix together with the
/// extreme singular values found while computing it.
#[derive(Debug, Clone)]
pub struct PseudoInverse<T: Scalar> {
    pub matrix: DMatrix<T>,
    pub sigma_min: T,
    pub sigma_max: T,
}

impl<T: Scalar> PseudoInverse<T> {
    /// `A^+ = R^-1 Q^T` from a thin Householder QR; equals `(A^T A)^-1 A^T`
    /// for full column rank without forming the normal equations.
    ///
    /// The SVD is avoided on purpose: for Jacobians with a nearly repeated
    /// singular pair it occasionally returns factors that do not reconstruct
    /// `A` (errors around 1e-4), while QR stays at round-off.
    pub fn compute(a: &DMatrix<T>) -> Result<Self> {
        let (n, m) = a.shape();
        if m == 0 || n < m {
            return Err(Error::dim(format!("pseudo-inverse needs a tall matrix, got {n}x{m}")));
        }
        let qr = a.clone().qr();
        let r = qr.r();
        let (sigma_min, sigma_max) = square_singular_range(&r);
        let singular = || Error::Singular {
            sigma_min: sigma_min.as_f64(),
            sigma_max: sigma_max.as_f64(),
        };
        if !(sigma_min >= T::lit(RANK_TOLERANCE) * sigma_max) || sigma_max == T::zero() {
            return Err(singular());
        }
        let matrix = r.solve_upper_triangular(&qr.q().transpose()).ok_or_else(singular)?;
        Ok(Self {
            matrix,
            sigma_min,
            sigma_max,
        })
    }
}

/// Extreme singular values of a square matrix from the symmetric eigenvalues
/// `±sigma_i` of `[[0, R], [R^T, 0]]`, which keeps the full relative range
/// (unlike the eigenvalues of `R^T R`).
fn square_singular_range<T: Scalar>(r: &DMatrix<T>) -> (T, T) {
    let m = r.nrows();
    let mut augmented = DMatrix::zeros(2 * m, 2 * m);
    augmented.view_mut((0, m), (m, m)).copy_from(r);
    augmented.view_mut((m, 0), (m, m)).copy_from(&r.transpose());
    let magnitudes = augmented.symmetric_eigenvalues().map(|x| x.abs());
    extremes(&magnitudes)
}

fn extremes<T: Scalar>(values: &DVector<T>) -> (T, T) {
    values.iter().fold((T::max_value().unwrap(), T::zero()), |(lo, hi), &s| {
        (if s < lo { s } else { lo }, if s > hi { s } else { hi })
    })
}

pub fn pseudo_inverse<T: Scalar>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    PseudoInverse::compute(a).map(|p| p.matrix)
}

/// Orthogonal projector `A A^+` onto the column span of `A`.
pub fn projection<T: Scalar>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    Ok(a * pseudo_inverse(a)?)
}

/// Smallest singular value; zero for empty matrices.
pub fn min_singular_value<T: Scalar>(a: &DMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    singular_value_range(a).0
}

/// `(sigma_min, sigma_max)` over the `min(n, m)` singular values.
pub fn singular_value_range<T: Scalar>(a: &DMatrix<T>) -> (T, T) {
    if a.is_empty() {
        return (T::zero(), T::zero());
    }
    let tall = if a.nrows() >= a.ncols() { a.clone() } else { a.transpose() };
    square_singular_range(&tall.qr().r())
}
