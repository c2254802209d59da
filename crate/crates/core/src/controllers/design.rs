use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::{bisect_root, golden_section_min};

/// Which bound on `||I - tau K_bar||` enters `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GVariant {
    /// `max_i |1 - tau k_i| / d_i^2`.
    #[default]
    Weighted,
    /// `max_i |1 - tau k_i|`, the operator norm of the diagonal matrix in any
    /// diagonally weighted norm.
    Induced,
}

/// `g(tau; mu) = max_i |1 - tau k_i| / w_i + mu tau^2`.
pub fn g_eval<T: Scalar>(tau: T, mu: T, kbar: &[T], weights: &[T], variant: GVariant) -> T {
    let linear = kbar
        .iter()
        .zip(weights)
        .map(|(&k, &d)| {
            let v = (T::one() - tau * k).abs();
            match variant {
                GVariant::Weighted => v / (d * d),
                GVariant::Induced => v,
            }
        })
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc });
    linear + mu * tau * tau
}

/// Offline gain design for a given remainder bound `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfflineDesign<T> {
    pub mu: T,
    pub tau_s_bar: T,
    pub tau_o_bar: T,
    pub rho: T,
    pub k_star: T,
    pub period: T,
}

/// Minimises the strictly convex `g` on `[0, tau_s_bar]`, where `tau_s_bar`
/// is the positive root of `g = 1`, and sets `k* = tau_o_bar / T`.
pub fn offline_design<T: Scalar>(
    mu: T,
    kbar: &[T],
    weights: &[T],
    period: T,
    variant: GVariant,
) -> Result<OfflineDesign<T>> {
    let mut problems = Vec::new();
    if !(mu >= T::zero()) {
        problems.push(format!("mu must be non-negative, got {mu}"));
    }
    if !(period > T::zero()) {
        problems.push(format!("sampling period must be positive, got {period}"));
    }
    if kbar.is_empty() || kbar.len() != weights.len() {
        problems.push("gains and weights must be non-empty and of equal length".into());
    }
    if kbar.iter().any(|&k| !(k > T::zero())) {
        problems.push("block gains must be positive".into());
    }
    if weights.iter().any(|&d| !(d >= T::one())) {
        problems.push("weights must satisfy d_i >= 1".into());
    }
    if !problems.is_empty() {
        return Err(Error::InvalidConfig(problems));
    }
    let g = |tau: T| g_eval(tau, mu, kbar, weights, variant);
    let one = T::one();

    let kmax = kbar.iter().fold(T::zero(), |a, &k| if k > a { k } else { a });
    let mut hi = T::lit(2.0) / kmax;
    let mut doublings = 0;
    while !(g(hi) > one) {
        hi *= T::lit(2.0);
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Numeric("offline design: g never exceeds 1".into()));
        }
    }
    let tol = T::lit(T::SEARCH_TOL) * hi.max(one);
    let min = golden_section_min(|t| Ok(g(t)), T::zero(), hi, tol)?;
    if !(min.value < one) {
        return Err(Error::Numeric(format!("offline design: min g = {} is not below 1", min.value)));
    }
    let tau_s_bar = bisect_root(|t| Ok(g(t) - one), min.x, hi, tol)?;
    Ok(OfflineDesign {
        mu,
        tau_s_bar,
        tau_o_bar: min.x,
        rho: min.value,
        k_star: min.x / period,
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g_examples() {
        assert!((g_eval::<f64>(0.5, 0.0, &[1.0], &[1.0], GVariant::Weighted) - 0.5).abs() < 1e-15);
        assert!((g_eval::<f64>(1.0, 0.25, &[1.0], &[1.0], GVariant::Weighted) - 0.25).abs() < 1e-15);
        assert!((g_eval::<f64>(0.5, 0.1, &[1.0, 2.0], &[1.0, 1.0], GVariant::Weighted) - 0.525).abs() < 1e-15);
    }

    #[test]
    fn variants_differ_only_with_weights() {
        let (k, d) = ([1.0, 3.0], [1.0, 2.0]);
        let weighted = g_eval::<f64>(0.6, 0.0, &k, &d, GVariant::Weighted);
        let induced = g_eval::<f64>(0.6, 0.0, &k, &d, GVariant::Induced);
        assert!((weighted - 0.4).abs() < 1e-15);
        assert!((induced - 0.8).abs() < 1e-15);
    }

    #[test]
    fn design_closed_forms() {
        let d = offline_design::<f64>(0.0, &[1.0], &[1.0], 1.5, GVariant::Weighted).unwrap();
        assert!((d.tau_o_bar - 1.0).abs() < 1e-10 && d.rho.abs() < 1e-10);
        assert!((d.k_star - 1.0 / 1.5).abs() < 1e-10);

        let d = offline_design::<f64>(0.25, &[1.0], &[1.0], 1.0, GVariant::Weighted).unwrap();
        assert!((d.tau_o_bar - 1.0).abs() < 1e-10);
        assert!((d.rho - 0.25).abs() < 1e-10);
        assert!((d.tau_s_bar - (-2.0 + 2.0 * 3f64.sqrt())).abs() < 1e-10);

        let d = offline_design::<f64>(1.0, &[1.0], &[1.0], 1.0, GVariant::Weighted).unwrap();
        assert!((d.tau_o_bar - 0.5).abs() < 1e-6);
        assert!((d.rho - 0.75).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        assert!(offline_design::<f64>(-1.0, &[1.0], &[1.0], 1.0, GVariant::Weighted).is_err());
        assert!(offline_design::<f64>(0.1, &[1.0], &[0.5], 1.0, GVariant::Weighted).is_err());
        assert!(offline_design::<f64>(0.1, &[1.0], &[1.0], 0.0, GVariant::Weighted).is_err());
        assert!(offline_design::<f64>(0.1, &[1.0, 2.0], &[1.0], 1.0, GVariant::Weighted).is_err());
    }

    proptest! {
        // Brute-force grid oracle for the minimiser and the g = 1 crossing.
        #[test]
        fn matches_dense_grid(
            mu in 0.0f64..3.0,
            kbar in proptest::collection::vec(0.2f64..3.0, 3),
            weights in proptest::collection::vec(1.0f64..3.0, 3),
            induced in any::<bool>(),
        ) {
            let variant = if induced { GVariant::Induced } else { GVariant::Weighted };
            let d = offline_design::<f64>(mu, &kbar, &weights, 1.0, variant).unwrap();
            let g = |t: f64| g_eval::<f64>(t, mu, &kbar, &weights, variant);
            let n = 200_000;
            let h = d.tau_s_bar / n as f64;
            let grid_min = (0..=n).map(|i| g(i as f64 * h)).fold(f64::INFINITY, f64::min);
            prop_assert!(d.rho <= grid_min + 1e-12);
            prop_assert!(d.rho >= grid_min - 3.0 * h * 4.0);
            prop_assert!((g(d.tau_s_bar) - 1.0).abs() < 1e-9);
            prop_assert!(d.tau_o_bar > 0.0 && d.tau_o_bar <= d.tau_s_bar);
            prop_assert!(d.rho < 1.0);
            // First-order optimality: no grid point beside the minimiser does better.
            let eps = 1e-4 * d.tau_s_bar;
            prop_assert!(g((d.tau_o_bar - eps).max(0.0)) >= d.rho - 1e-12);
            prop_assert!(g(d.tau_o_bar + eps) >= d.rho - 1e-12);
        }

        #[test]
        fn g_is_convex(
            mu in 0.0f64..3.0,
            kbar in proptest::collection::vec(0.2f64..3.0, 3),
            weights in proptest::collection::vec(1.0f64..3.0, 3),
            t1 in 0.0f64..4.0,
            t2 in 0.0f64..4.0,
            lam in 0.0f64..1.0,
        ) {
            let g = |t: f64| g_eval::<f64>(t, mu, &kbar, &weights, GVariant::Weighted);
            let mid = lam * t1 + (1.0 - lam) * t2;
            prop_assert!(g(mid) <= lam * g(t1) + (1.0 - lam) * g(t2) + 1e-12);
            prop_assert!(g(0.0) <= 1.0);
        }
    }
}
