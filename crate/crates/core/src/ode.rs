//! Fixed-step classical Runge-Kutta.

use nalgebra::DVector;

use crate::error::Result;
use crate::scalar::Scalar;

/// One RK4 step of size `h` for `x' = f(x)`.
pub fn rk4_step<T, F>(f: &mut F, x: &DVector<T>, h: T) -> Result<DVector<T>>
where
    T: Scalar,
    F: FnMut(&DVector<T>) -> Result<DVector<T>>,
{
    let half = h * T::lit(0.5);
    let k1 = f(x)?;
    let k2 = f(&(x + &k1 * half))?;
    let k3 = f(&(x + &k2 * half))?;
    let k4 = f(&(x + &k3 * h))?;
    Ok(x + (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_exponential_decay() {
        let mut f = |x: &DVector<f64>| Ok(-x);
        let mut gap = |steps: usize| {
            let h = 1.0 / steps as f64;
            let mut x = DVector::from_element(1, 1.0);
            for _ in 0..steps {
                x = rk4_step(&mut f, &x, h).unwrap();
            }
            (x[0] - (-1.0f64).exp()).abs()
        };
        let ratio = gap(20) / gap(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }
}
