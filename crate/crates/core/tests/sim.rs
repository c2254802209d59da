mod common;

use common::*;
use coopctl::controllers::*;
use coopctl::experiment::{preset, run_experiment};
use coopctl::model::{Ball, NormKind, WeightedNorm};
use coopctl::sim::*;
use coopctl::systems::{CoriolisMode, DynamicParams, FlyCrane4, KinematicSystem, LinearTallSystem};
use nalgebra::{DMatrix, DVector};

const PERIOD: f64 = 1.5;

fn linear_ball(sys: &LinearTallSystem<f64>, radius: f64) -> Ball<f64> {
    Ball::new(DVector::from_vec(vec![0.3, -0.2]), radius, WeightedNorm::unweighted(sys.layout(), NormKind::Two)).unwrap()
}

#[test]
fn continuous_run_converges_at_fourth_order() {
    let sys = linear_system();
    let ball = linear_ball(&sys, 2.0);
    let kbar = BlockGains::identity(sys.layout());
    let (k, t_end) = (1.5, 4.0);
    let e0 = DVector::from_vec(vec![0.8, -0.6]);
    let gap = |dt: f64| {
        let run = integrate_kinematic_continuous(&sys, &ball, &(&ball.center + &e0), k, &kbar, t_end, dt).unwrap();
        let exact = &e0 * (-k * t_end).exp();
        (run.trace.q.last().unwrap() - &ball.center - exact).amax()
    };
    let ratio = gap(0.2) / gap(0.1);
    assert!((12.0..20.0).contains(&ratio), "halving ratio {ratio}");
}

#[test]
fn linear_dynamics_match_matrix_exponential() {
    // Orthonormal columns, unit agent mass and no load: M = I and C = 0, so
    // (e, e') follows a constant-coefficient linear system.
    let b = DMatrix::from_row_slice(3, 2, &[0.6, 0.0, 0.8, 0.0, 0.0, 1.0]);
    let sys = LinearTallSystem::dense(b).unwrap();
    let ball = linear_ball(&sys, 2.0);
    let params = DynamicParams::uniform(sys.layout(), 1.0, &[], CoriolisMode::Zero).unwrap();
    let (k, alpha) = (0.8, 5.0);
    let schedule = GainSchedule::new(BlockGains::identity(sys.layout()), PERIOD, k).unwrap();
    let setup = DynamicSetup { strategy: Strategy::Continuous, alpha, t_end: 3.0, dt: 0.01 };
    let e0 = DVector::from_vec(vec![0.5, -0.4]);
    let run = integrate_dynamic(&sys, &params, &ball, &(&ball.center + &e0), &DVector::zeros(2), &schedule, &setup, &AuxOptions::default())
        .unwrap();
    assert!(run.aborted.is_none());

    let mut generator = DMatrix::zeros(4, 4);
    generator.view_mut((0, 2), (2, 2)).fill_with_identity();
    generator.view_mut((2, 0), (2, 2)).fill_with_identity();
    generator.view_mut((2, 0), (2, 2)).scale_mut(-alpha * k);
    generator.view_mut((2, 2), (2, 2)).fill_with_identity();
    generator.view_mut((2, 2), (2, 2)).scale_mut(-alpha);
    let x0 = DVector::from_vec(vec![e0[0], e0[1], 0.0, 0.0]);
    let mut worst: f64 = 0.0;
    for (t, q) in run.trace.times.iter().zip(&run.trace.q) {
        let exact = (&generator * *t).exp() * &x0;
        worst = worst.max((q - &ball.center - exact.rows(0, 2)).amax());
    }
    assert!(worst <= 1e-6, "gap {worst:e}");
}

#[test]
fn stiff_force_tracks_the_kinematic_loop() {
    let sys = linear_system();
    let ball = linear_ball(&sys, 2.0);
    let params = DynamicParams::uniform(sys.layout(), 1.0, &[], CoriolisMode::Zero).unwrap();
    let schedule = GainSchedule::new(BlockGains::identity(sys.layout()), PERIOD, 0.8).unwrap();
    let q0 = &ball.center + DVector::from_vec(vec![0.5, -0.4]);
    let kinematic = integrate_kinematic_continuous(&sys, &ball, &q0, 0.8, &schedule.kbar, 3.0, 0.001).unwrap();
    let gap = |alpha: f64| {
        let setup = DynamicSetup { strategy: Strategy::Continuous, alpha, t_end: 3.0, dt: 0.001 };
        let run = integrate_dynamic(&sys, &params, &ball, &q0, &DVector::zeros(2), &schedule, &setup, &AuxOptions::default())
            .unwrap();
        run.trace.q.iter().zip(&kinematic.trace.q).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max)
    };
    let (slow, fast) = (gap(10.0), gap(100.0));
    assert!(fast < 0.2 * slow, "gap {slow:e} -> {fast:e}");
}

#[test]
fn sampled_runs_never_rise_within_an_interval() {
    let (sys, ball) = planar_ball(0.3, NormKind::Two);
    let kbar = BlockGains::identity(sys.layout());
    let ab = estimate_ab(&sys, &ball, &kbar, 300, 41).unwrap();
    let design = offline_design(mu_from_ab(ab.a, ab.b, ball.radius), kbar.gains(), ball.norm.weights(), PERIOD, GVariant::Weighted).unwrap();
    let schedule = GainSchedule::new(kbar, PERIOD, design.k_star).unwrap();
    let mut r = rng(42);
    for _ in 0..5 {
        let q0 = ball.sample_point(&mut r);
        for strategy in [Strategy::Offline, Strategy::Online] {
            let run = integrate_kinematic_sampled(&sys, &ball, &q0, &schedule, strategy, 4.0 * PERIOD, 0.015, &AuxOptions::default()).unwrap();
            assert!(run.trace.in_ball.iter().all(|&b| b));
            assert_eq!(run.sample_indices, vec![0, 100, 200, 300, 400]);
            let norms = &run.trace.norms;
            for w in run.sample_indices.windows(2) {
                let start = norms[w[0]];
                assert!(norms[w[0]..w[1]].iter().all(|&n| n <= start), "{strategy}: rise inside [{}, {})", w[0], w[1]);
                if strategy == Strategy::Offline {
                    assert!(norms[w[1]] <= design.rho * start + 1e-12);
                }
            }
        }
    }
}

#[test]
fn continuous_crane_run_decreases_strictly() {
    let (sys, ball) = crane_ball(0.2, NormKind::Inf);
    let kbar = BlockGains::identity(sys.layout());
    let mut r = rng(43);
    let q0 = ball.sample_point(&mut r);
    let run = integrate_kinematic_continuous(&sys, &ball, &q0, 0.5, &kbar, 10.0, 0.01).unwrap();
    assert!(run.trace.norms.windows(2).all(|w| w[1] < w[0]));
    assert!(run.trace.final_norm() < 0.01 * run.trace.norms[0]);
}

#[test]
fn assumption_sweep_on_the_crane_ball() {
    let (sys, ball) = crane_ball(0.2, NormKind::Two);
    let params = DynamicParams::uniform(sys.layout(), 1.0, &[2.0, 2.0, 2.0, 0.1, 0.1, 0.2], CoriolisMode::Christoffel).unwrap();
    let kbar = BlockGains::identity(FlyCrane4::<f64>::default().layout());
    let report = check_sp_assumptions(&sys, &params, &ball, 0.5, &kbar, 500, 44);
    assert!(report.all_ok(), "{report:?}");
    assert!(report.hurwitz_margin > 0.0);
    assert_eq!(report.samples, 500);
}

#[test]
fn experiment_files_match_their_grids() {
    let config = preset("linear-deadbeat").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&config, dir.path()).unwrap();
    let m = 2;
    let grid = (config.simulation.t_end / config.simulation.dt).round() as usize + 1;
    assert_eq!(out.csv_files.len(), out.report.runs.len());
    for summary in &out.report.runs {
        assert_eq!(summary.grid_points, grid);
        let text = std::fs::read_to_string(dir.path().join(&summary.file)).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header.len(), m + 4);
        assert_eq!(header[..3], ["t", "k_h", "norm_e"]);
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), grid);
        assert!(rows.iter().all(|r| r.len() == m + 4));
        let written = rows.last().unwrap()[2];
        assert!((written - summary.final_norm).abs() <= 1e-11 * summary.final_norm.abs());
        assert!(!text.contains('\r'));
    }
}
