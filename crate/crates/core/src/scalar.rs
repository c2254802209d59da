//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point type the control and simulation code is generic over.
///
/// Implemented for `f32` and `f64`. Literal constants are written as `f64`
/// and converted with [`Scalar::lit`].
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Relative tolerance for bracketed scalar searches. A few ulps: the
    /// closest-approach time scales the next error by `1 + O(tol)`, so a
    /// looser value puts a relative floor under otherwise quadratic decay.
    const SEARCH_TOL: f64;
    /// Relative step for central finite differences.
    const FD_STEP: f64;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const SEARCH_TOL: f64 = 4.0 * f32::EPSILON as f64;
    const FD_STEP: f64 = 5e-3;
}

impl Scalar for f64 {
    const SEARCH_TOL: f64 = 4.0 * f64::EPSILON;
    const FD_STEP: f64 = 1e-6;
}

/// Central-difference step for coordinate value `x`.
pub(crate) fn fd_step<T: Scalar>(x: T) -> T {
    T::lit(T::FD_STEP) * x.abs().max(T::one())
}
