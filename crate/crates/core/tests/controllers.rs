mod common;

use std::sync::OnceLock;

use common::*;
use coopctl::controllers::*;
use coopctl::model::{Ball, NormKind};
use coopctl::rng::{stream, Purpose};
use coopctl::systems::{FlyCrane4, KinematicSystem};
use proptest::prelude::*;

const RADIUS: f64 = 0.2;

struct Certified {
    sys: FlyCrane4<f64>,
    ball: Ball<f64>,
    kbar: BlockGains<f64>,
    design: OfflineDesign<f64>,
}

/// Crane ball with `mu` from the sampled `a`, `b` bounds, built once.
fn certified() -> &'static Certified {
    static CELL: OnceLock<Certified> = OnceLock::new();
    CELL.get_or_init(|| {
        let (sys, ball) = crane_ball(RADIUS, NormKind::Inf);
        let kbar = BlockGains::identity(sys.layout());
        let ab = estimate_ab(&sys, &ball, &kbar, 1000, 31).unwrap();
        let mu = mu_from_ab(ab.a, ab.b, RADIUS);
        let design = offline_design(mu, kbar.gains(), ball.norm.weights(), 1.5, GVariant::Weighted).unwrap();
        Certified { sys, ball, kbar, design }
    })
}

#[test]
fn closest_approach_is_stable_under_step_halving() {
    let c = certified();
    let mut r = rng(32);
    for _ in 0..5 {
        let e_h = c.ball.sample_point(&mut r) - &c.ball.center;
        let coarse = simulate_auxiliary(&c.sys, &c.ball, &e_h, &c.kbar, &AuxOptions::default()).unwrap();
        let fine_opts = AuxOptions {
            grid_fraction: AuxOptions::default().grid_fraction / 2.0,
            ..AuxOptions::default()
        };
        let fine = simulate_auxiliary(&c.sys, &c.ball, &e_h, &c.kbar, &fine_opts).unwrap();
        assert!((coarse.tau_o - fine.tau_o).abs() <= 1e-4, "{} vs {}", coarse.tau_o, fine.tau_o);
    }
}

#[test]
fn sampled_bounds_grow_with_sample_count_and_repeat_exactly() {
    let (sys, ball) = crane_ball(RADIUS, NormKind::Inf);
    let kbar = BlockGains::identity(sys.layout());
    let small = estimate_ab(&sys, &ball, &kbar, 100, 33).unwrap();
    let large = estimate_ab(&sys, &ball, &kbar, 200, 33).unwrap();
    assert!(large.a_max >= small.a_max && large.b_max >= small.b_max);
    assert!(small.a.is_finite() && small.b.is_finite() && small.a > 0.0 && small.b > 0.0);
    let again = estimate_ab(&sys, &ball, &kbar, 100, 33).unwrap();
    assert_eq!(small.a.to_bits(), again.a.to_bits());
    assert_eq!(small.b.to_bits(), again.b.to_bits());
    assert_eq!(small.skipped, 0);
}

#[test]
fn nearer_ball_has_smaller_mu() {
    let kbar = BlockGains::identity(FlyCrane4::<f64>::default().layout());
    let mu = |radius: f64| {
        let (sys, ball) = crane_ball(radius, NormKind::Inf);
        let ab = estimate_ab(&sys, &ball, &kbar, 300, 34).unwrap();
        mu_from_ab(ab.a, ab.b, radius)
    };
    assert!(mu(0.05) < mu(0.2));
}

#[test]
fn monte_carlo_mu_star_stays_below_bound() {
    let c = certified();
    let mc = mc_mu_star(&c.sys, &c.ball, &c.kbar, 60, 35, &AuxOptions::default()).unwrap();
    assert!(mc.mu_star > 0.0);
    assert!(mc.mu_star <= c.design.mu, "{} > {}", mc.mu_star, c.design.mu);
    let star = offline_design(mc.mu_star, c.kbar.gains(), c.ball.norm.weights(), 1.5, GVariant::Weighted).unwrap();
    assert!(star.rho <= c.design.rho);
}

#[test]
fn online_step_meets_the_certified_rate() {
    let c = certified();
    let mut r = rng(36);
    for _ in 0..10 {
        let e_h = c.ball.sample_point(&mut r) - &c.ball.center;
        let step = online_step_from_error(&c.sys, &c.ball, &e_h, &c.kbar, 1.5, c.design.k_star, &AuxOptions::default()).unwrap();
        assert!(!step.fell_back);
        assert!((step.k * 1.5 - step.tau_o).abs() <= 1e-12);
        assert!(step.tau_o >= c.design.tau_o_bar);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn auxiliary_flow_contracts_inside_its_first_return(index in 0u64..1_000_000) {
        let c = certified();
        let mut r = stream(37, Purpose::Misc, index);
        let e_h = c.ball.sample_point(&mut r) - &c.ball.center;
        let traj = simulate_auxiliary(&c.sys, &c.ball, &e_h, &c.kbar, &AuxOptions::default()).unwrap();
        let n0 = traj.initial_norm;
        prop_assert_eq!(traj.norms[0], n0);
        prop_assert!(traj.norms[1..].iter().all(|&n| n < n0));
        prop_assert!(traj.norms.iter().all(|&n| traj.min_norm <= n));

        // The certified closest-approach time is reached before the first
        // return and already achieves the rate.
        let tau_s = traj.tau_s.unwrap_or(traj.horizon);
        prop_assert!(c.design.tau_o_bar <= tau_s);
        let flow = AuxFlow::new(&c.sys, &c.ball.center, &e_h, &c.kbar).unwrap();
        let at_bar = traj.state_at(&flow, c.design.tau_o_bar).unwrap();
        prop_assert!(c.ball.norm.norm(&at_bar) <= c.design.rho * n0 + 1e-12);
    }
}
