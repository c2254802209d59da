use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::info;
use nalgebra::DVector;
use rayon::prelude::*;

use super::config::{ExperimentConfig, MuSource, Resolved, ResolvedStart, SCHEMA_VERSION};
use super::report::{BallDesign, DesignReport, ExperimentReport, RunSummary};
use crate::controllers::{
    estimate_ab, mc_mu_star, mu_from_ab, offline_design, BoundConstants, GainSchedule, Strategy,
};
use crate::error::{Error, Result};
use crate::sim::{
    check_sp_assumptions, integrate_dynamic, integrate_kinematic_sampled, write_csv, DynamicSetup, Trace,
};

/// Slack when comparing the Monte-Carlo `mu*` with the certified `mu`; both
/// are zero up to rounding on systems with a constant Jacobian.
pub const MU_COMPARE_SLACK: f64 = 1e-8;

/// Files written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub report_path: PathBuf,
    pub csv_files: Vec<PathBuf>,
}

fn design_ball(config: &ExperimentConfig, resolved: &Resolved, start: &ResolvedStart) -> Result<BallDesign> {
    let sys = resolved.system.as_dyn();
    let ball = &start.ball;
    let kbar = &resolved.kbar;
    let d = &config.design;
    let aux = d.aux_options();
    let ab = estimate_ab(sys, ball, kbar, d.ab_samples, config.seed)?;
    let mu = mu_from_ab(ab.a, ab.b, ball.radius);
    let mc = mc_mu_star(sys, ball, kbar, d.mu_star_trajectories, config.seed, &aux)?;
    let weights = ball.norm.weights();
    let variant = config.norm.g_variant;
    let period = config.control.period;
    let design_mu = offline_design(mu, kbar.gains(), weights, period, variant)?;
    let design_mu_star = offline_design(mc.mu_star, kbar.gains(), weights, period, variant)?;
    if mc.mu_star > mu + MU_COMPARE_SLACK || design_mu_star.rho > design_mu.rho + MU_COMPARE_SLACK {
        return Err(Error::Numeric(format!(
            "Monte-Carlo refinement exceeds the certified bound: mu* = {}, mu = {mu}, rho(mu*) = {}, rho(mu) = {}",
            mc.mu_star, design_mu_star.rho, design_mu.rho
        )));
    }
    let k_star = match config.control.mu_source {
        MuSource::MonteCarlo => design_mu_star.k_star,
        MuSource::Bound => design_mu.k_star,
    };
    let assumptions = resolved.dynamics.as_ref().map(|(params, _)| {
        check_sp_assumptions(sys, params, ball, k_star, kbar, d.assumption_samples, config.seed)
    });
    Ok(BallDesign {
        initial_condition: start.name.clone(),
        radius: ball.radius,
        constants: BoundConstants {
            a: ab.a,
            b: ab.b,
            radius: ball.radius,
            mu,
            mu_star: mc.mu_star,
            ab_samples: ab.samples,
            mu_star_trajectories: mc.trajectories,
            seed: config.seed,
        },
        design_mu,
        design_mu_star,
        mu_source: config.control.mu_source,
        k_star,
        assumptions,
    })
}

fn design_all(config: &ExperimentConfig, resolved: &Resolved) -> Result<DesignReport> {
    let balls = resolved
        .starts
        .par_iter()
        .map(|start| design_ball(config, resolved, start).map_err(|e| e.in_scenario(format!("design for {}", start.name))))
        .collect::<Result<Vec<_>>>()?;
    Ok(DesignReport {
        schema_version: SCHEMA_VERSION,
        name: config.name.clone(),
        seed: config.seed,
        system: resolved.system.as_dyn().name().to_string(),
        norm: config.norm.kind,
        balls,
    })
}

/// Bound constants and offline designs for every ball of the config.
/// Fails if the Monte-Carlo refinement is not below the certified bound.
pub fn design_report(config: &ExperimentConfig) -> Result<DesignReport> {
    let resolved = config.resolve()?;
    design_all(config, &resolved)
}

struct Job {
    start: usize,
    strategy: Strategy,
    alpha: Option<f64>,
}

impl Job {
    fn stem(&self, starts: &[ResolvedStart]) -> String {
        let base = format!("{}_{}", starts[self.start].name, self.strategy);
        match self.alpha {
            Some(a) => format!("{base}_alpha{a}"),
            None => base,
        }
    }
}

fn write_trace(path: &Path, trace: &Trace<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    write_csv(trace, BufWriter::new(file)).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn run_job(
    config: &ExperimentConfig,
    resolved: &Resolved,
    design: &DesignReport,
    job: &Job,
    out_dir: &Path,
) -> Result<(RunSummary, PathBuf)> {
    let sys = resolved.system.as_dyn();
    let start = &resolved.starts[job.start];
    let ball_design = &design.balls[job.start];
    let k = match job.strategy {
        Strategy::Continuous => config.control.continuous_gain.unwrap_or(ball_design.k_star),
        _ => ball_design.k_star,
    };
    let schedule = GainSchedule::new(resolved.kbar.clone(), config.control.period, k)?;
    let aux = config.design.aux_options();
    let stem = job.stem(&resolved.starts);
    let path = out_dir.join(format!("{stem}.csv"));
    let (trace, samples, fallbacks, converged, aborted) = match job.alpha {
        None => {
            let run = integrate_kinematic_sampled(
                sys,
                &start.ball,
                &start.q0,
                &schedule,
                job.strategy,
                config.simulation.t_end,
                config.simulation.dt,
                &aux,
            )?;
            (run.trace, run.sample_indices.len(), run.fallbacks, None, None)
        }
        Some(alpha) => {
            let (params, dt) = resolved.dynamics.as_ref().expect("dynamic job without dynamics");
            let setup = DynamicSetup {
                strategy: job.strategy,
                alpha,
                t_end: config.simulation.t_end,
                dt: *dt,
            };
            let m = start.q0.len();
            let run = integrate_dynamic(sys, params, &start.ball, &start.q0, &DVector::zeros(m), &schedule, &setup, &aux)?;
            (run.trace, run.sample_indices.len(), 0, Some(run.converged), run.aborted)
        }
    };
    write_trace(&path, &trace)?;
    info!("wrote {} ({} points)", path.display(), trace.len());
    let summary = RunSummary {
        file: format!("{stem}.csv"),
        initial_condition: start.name.clone(),
        strategy: job.strategy,
        alpha: job.alpha,
        grid_points: trace.len(),
        samples,
        initial_norm: trace.norms[0],
        final_norm: trace.final_norm(),
        stayed_in_ball: trace.in_ball.iter().all(|&b| b),
        converged,
        fallbacks,
        aborted,
    };
    Ok((summary, path))
}

/// Designs every ball, runs every (start, strategy[, alpha]) combination in
/// parallel and writes one CSV per run plus `report.toml` into `out_dir`.
/// Output bytes depend only on the config (including its seed).
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutput> {
    let resolved = config.resolve()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(format!("creating {}", out_dir.display()), e))?;
    let design = design_all(config, &resolved)?;

    let alphas: Vec<Option<f64>> = match &config.dynamics {
        Some(d) => d.alphas.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut jobs = Vec::new();
    for start in 0..resolved.starts.len() {
        for &strategy in &config.control.strategies {
            for &alpha in &alphas {
                jobs.push(Job { start, strategy, alpha });
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|job| {
            run_job(config, &resolved, &design, job, out_dir).map_err(|e| e.in_scenario(job.stem(&resolved.starts)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (runs, csv_files): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let report = ExperimentReport { design, runs };
    let report_path = out_dir.join("report.toml");
    std::fs::write(&report_path, report.to_toml_string()?)
        .map_err(|e| Error::io(format!("writing {}", report_path.display()), e))?;
    Ok(ExperimentOutput {
        report,
        report_path,
        csv_files,
    })
}
