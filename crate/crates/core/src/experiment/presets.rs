//! Named scenario bundles. The source scenarios publish no numeric initial
//! conditions or force gains, so these use documented defaults and give a
//! qualitative reproduction only.

use super::config::*;
use crate::controllers::{GVariant, Strategy};
use crate::error::{Error, Result};
use crate::model::{NormKind, WeightConvention};
use crate::systems::{CoriolisMode, FlyCraneParams};

pub const PRESET_NAMES: [&str; 3] = ["online-vs-offline", "alpha-sweep", "linear-deadbeat"];

/// Close start: infinity-norm distance 0.05 under load weight 2.
const NEAR_OFFSET: [f64; 10] = [0.04, -0.05, 0.03, -0.02, 0.08, -0.06, 0.04, 0.1, -0.08, 0.12];
/// Far start: infinity-norm distance 0.2.
const FAR_OFFSET: [f64; 10] = [0.18, -0.2, 0.12, -0.1, 0.3, -0.25, 0.2, 0.4, -0.3, 0.5];
/// Half the far start, keeping the weighted 2-norm (about 0.19) inside the pitch limit.
const SWEEP_OFFSET: [f64; 10] = [0.09, -0.1, 0.06, -0.05, 0.15, -0.125, 0.1, 0.2, -0.15, 0.25];

fn fly_crane(name: &str, kind: NormKind, strategies: Vec<Strategy>) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        seed: 2021,
        out_dir: None,
        system: SystemConfig::FlyCrane4 {
            params: FlyCraneParams::default(),
        },
        reference: None,
        norm: NormConfig {
            kind,
            // Four cable angles weighted 1, the load block weighted 2 (D = diag{I_4, I_6 / 4}).
            weights: Some(vec![1.0, 1.0, 1.0, 1.0, 2.0]),
            convention: WeightConvention::Matrix,
            g_variant: GVariant::Weighted,
        },
        control: ControlConfig {
            kbar: Some(vec![1.0; 5]),
            period: 1.5,
            strategies,
            mu_source: MuSource::MonteCarlo,
            continuous_gain: None,
        },
        design: DesignConfig::default(),
        simulation: SimulationConfig { t_end: 30.0, dt: 0.015 },
        dynamics: None,
        initial_conditions: Vec::new(),
    }
}

fn offset(name: &str, values: [f64; 10]) -> InitialCondition {
    InitialCondition {
        name: name.into(),
        offset: Some(values.to_vec()),
        random_radius: None,
        radius: None,
    }
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "online-vs-offline" => {
            let mut c = fly_crane(name, NormKind::Inf, vec![Strategy::Offline, Strategy::Online]);
            c.initial_conditions = vec![offset("q1", NEAR_OFFSET), offset("q2", FAR_OFFSET)];
            Ok(c)
        }
        "alpha-sweep" => {
            let mut c = fly_crane(name, NormKind::Two, vec![Strategy::Offline, Strategy::Online]);
            c.simulation.t_end = 15.0;
            c.dynamics = Some(DynamicsConfig {
                alphas: vec![0.3, 3.0, 30.0],
                agent_mass: 1.0,
                load_inertia: vec![2.0, 2.0, 2.0, 0.1, 0.1, 0.2],
                coriolis: CoriolisMode::Christoffel,
                dt: None,
            });
            c.initial_conditions = vec![offset("q0", SWEEP_OFFSET)];
            Ok(c)
        }
        "linear-deadbeat" => Ok(ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            seed: 7,
            out_dir: None,
            system: SystemConfig::LinearTall {
                rows: vec![vec![1.0, 0.0], vec![0.5, 1.0], vec![0.0, 2.0]],
                layout: None,
            },
            reference: Some(vec![0.0, 0.0]),
            norm: NormConfig {
                kind: NormKind::Two,
                weights: None,
                convention: WeightConvention::Matrix,
                g_variant: GVariant::Weighted,
            },
            control: ControlConfig {
                kbar: None,
                period: 1.0,
                strategies: vec![Strategy::Continuous, Strategy::Offline, Strategy::Online],
                mu_source: MuSource::MonteCarlo,
                continuous_gain: Some(1.0),
            },
            design: DesignConfig {
                ab_samples: 200,
                mu_star_trajectories: 50,
                ..DesignConfig::default()
            },
            simulation: SimulationConfig { t_end: 3.0, dt: 0.01 },
            dynamics: None,
            initial_conditions: vec![InitialCondition {
                name: "random".into(),
                offset: None,
                random_radius: Some(0.5),
                radius: None,
            }],
        }),
        other => Err(Error::InvalidConfig(vec![format!(
            "unknown preset {other:?}; available: {}",
            PRESET_NAMES.join(", ")
        )])),
    }
}
