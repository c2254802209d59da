//! Bracketed scalar searches.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// The bracket endpoints are evaluated as well, so a minimum sitting on the
/// boundary is returned exactly.
pub fn golden_section_min<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<Minimum<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    if !(hi >= lo) {
        return Err(Error::Numeric(format!("golden section: empty bracket [{lo}, {hi}]")));
    }
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut best = Minimum {
        x: lo,
        value: f(lo)?,
        evaluations: 1,
    };
    let consider = |x: T, v: T, best: &mut Minimum<T>| {
        best.evaluations += 1;
        if v < best.value {
            best.x = x;
            best.value = v;
        }
    };
    let fhi = f(hi)?;
    consider(hi, fhi, &mut best);

    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    let mut iterations = 0;
    while b - a > tol && iterations < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            if c == d {
                break;
            }
            fc = f(c)?;
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            if c == d {
                break;
            }
            fd = f(d)?;
            consider(d, fd, &mut best);
        }
        iterations += 1;
    }
    if !best.value.is_finite() {
        return Err(Error::Numeric("golden section: non-finite objective".into()));
    }
    Ok(best)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect_root<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::Numeric(format!("bisection: no sign change on [{lo}, {hi}]")));
    }
    let a_positive = fa > T::zero();
    let two = T::lit(2.0);
    for _ in 0..300 {
        let mid = (a + b) / two;
        if b - a <= tol || mid == a || mid == b {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == a_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) / two)
}
