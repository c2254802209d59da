//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use coopctl::model::{Ball, NormKind, WeightedNorm};
use coopctl::systems::{FlyCrane4, KinematicSystem, LinearTallSystem, PlanarTriLink};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Central-difference Jacobian of the forward kinematics.
pub fn fd_jacobian<S: KinematicSystem<f64> + ?Sized>(sys: &S, q: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = sys.layout().n();
    let m = q.len();
    let mut jac = DMatrix::zeros(n, m);
    for k in 0..m {
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[k] += h;
        qm[k] -= h;
        let d = (sys.forward_kinematics(&qp).unwrap() - sys.forward_kinematics(&qm).unwrap()) / (2.0 * h);
        jac.set_column(k, &d);
    }
    jac
}

/// Uniform draw in the box `center +- half_width`.
pub fn box_state(rng: &mut ChaCha8Rng, center: &DVector<f64>, half_width: f64) -> DVector<f64> {
    center.map(|c| c + half_width * (2.0 * rng.random::<f64>() - 1.0))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Four unit-weight cable blocks and a load block of weight 2.
pub fn crane_norm(sys: &FlyCrane4<f64>, kind: NormKind) -> WeightedNorm<f64> {
    WeightedNorm::new(sys.layout(), vec![1.0, 1.0, 1.0, 1.0, 2.0], kind).unwrap()
}

pub fn crane_ball(radius: f64, kind: NormKind) -> (FlyCrane4<f64>, Ball<f64>) {
    let sys = FlyCrane4::default();
    let ball = Ball::new(sys.reference_configuration(), radius, crane_norm(&sys, kind)).unwrap();
    (sys, ball)
}

pub fn planar_ball(radius: f64, kind: NormKind) -> (PlanarTriLink<f64>, Ball<f64>) {
    let sys = PlanarTriLink::default();
    let norm = WeightedNorm::unweighted(sys.layout(), kind);
    let ball = Ball::new(sys.reference_configuration(), radius, norm).unwrap();
    (sys, ball)
}

pub fn linear_system() -> LinearTallSystem<f64> {
    LinearTallSystem::dense(DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.5, 1.0, 0.0, 2.0])).unwrap()
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Smallest `||e_h||` whose next step is still resolved. Each sampled step
/// carries relative round-off of about 1e-15, so the quadratic residual
/// `c ||e_h||^2` dominates it once `||e_h||` is well above `1e-15 / c`; for
/// the systems here (`c >= 0.05`) that is a signal-to-noise of at least 5 at
/// this floor, a shift below 0.2 in `log e_{h+1}` against magnitudes above 60.
/// Below it the sequence enters a linear round-off tail (ratios near 1e-15).
pub const ORDER_RESOLUTION: f64 = 1e-13;

/// Order of convergence from a sequence of sampled norms: slope of
/// `log e_{h+1}` against `log e_h` over the last `count` contracting pairs
/// whose predecessor is above [`ORDER_RESOLUTION`].
pub fn convergence_order(norms: &[f64], count: usize) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = norms
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| b < a && b > 0.0 && a > ORDER_RESOLUTION)
        .collect();
    if pairs.len() < count {
        return None;
    }
    let tail = &pairs[pairs.len() - count..];
    let x: Vec<f64> = tail.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    Some(ls_slope(&x, &y))
}
