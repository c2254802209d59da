use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use coopctl::controllers::Strategy;
use coopctl::experiment::{preset, run_experiment, ExperimentConfig, PRESET_NAMES};
use coopctl::model::NormKind;
use coopctl::{Error, ErrorCategory};

/// Run cooperative-manipulation control experiments and write CSV traces
/// plus a design report.
#[derive(Debug, Parser)]
#[command(name = "coopctl", version)]
#[command(group(ArgGroup::new("source").required(true).args(["config", "preset", "list_presets"])))]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Built-in scenario (see --list-presets).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Print the built-in scenario names and exit.
    #[arg(long)]
    list_presets: bool,

    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory (default: the config's out_dir, else out/<name>).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Run only this strategy: continuous, offline or online.
    #[arg(long)]
    strategy: Option<Strategy>,

    /// Replace the force gains of a dynamic scenario (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,

    /// Override the norm: inf or two.
    #[arg(long)]
    norm: Option<NormKind>,

    /// Only report errors.
    #[arg(long, short)]
    quiet: bool,
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Config => 2,
        ErrorCategory::Numeric => 3,
        ErrorCategory::Io => 4,
    }
}

fn category_name(category: ErrorCategory) -> &'static str {
    match category {
        ErrorCategory::Config => "config",
        ErrorCategory::Numeric => "numeric",
        ErrorCategory::Io => "io",
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match (&cli.config, &cli.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(strategy) = cli.strategy {
        config.control.strategies = vec![strategy];
    }
    if let Some(norm) = cli.norm {
        config.norm.kind = norm;
    }
    if !cli.alpha.is_empty() {
        match config.dynamics.as_mut() {
            Some(d) => d.alphas = cli.alpha.clone(),
            None => {
                return Err(Error::InvalidConfig(vec![
                    "--alpha needs a scenario with a [dynamics] section".into(),
                ]))
            }
        }
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = load(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&config.name));
    let output = run_experiment(&config, &out)?;
    if !cli.quiet {
        for ball in &output.report.design.balls {
            println!(
                "{}: R = {:.4e}  mu = {:.4e}  mu* = {:.4e}  rho(mu) = {:.6}  rho(mu*) = {:.6}  k* = {:.6}",
                ball.initial_condition,
                ball.radius,
                ball.constants.mu,
                ball.constants.mu_star,
                ball.design_mu.rho,
                ball.design_mu_star.rho,
                ball.k_star
            );
        }
        for r in &output.report.runs {
            let status = match (r.converged, &r.aborted) {
                (_, Some(_)) => " [aborted]",
                (Some(false), None) => " [not converged]",
                _ => "",
            };
            println!(
                "{}: {:.4e} -> {:.4e}{}",
                r.file, r.initial_norm, r.final_norm, status
            );
        }
        println!("report: {}", output.report_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "error" } else { "warn" }))
        .init();
    if cli.list_presets {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = err.category();
            eprintln!("error[{}]: {err}", category_name(category));
            ExitCode::from(exit_code(category))
        }
    }
}
