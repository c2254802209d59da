use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::controllers::{AuxOptions, BlockGains, GVariant, Strategy};
use crate::error::{Error, Result};
use crate::model::{Ball, BlockLayout, NormKind, WeightConvention, WeightedNorm};
use crate::rng::{stream, Purpose};
use crate::systems::{
    CoriolisMode, DynamicParams, FlyCrane4, FlyCraneParams, KinematicSystem, LinearTallSystem, PlanarTriLink,
    PlanarTriLinkParams,
};

/// Version of the configuration and report layout understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// A complete scenario description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Default output directory; the command line can override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub system: SystemConfig,
    /// `q^r`; defaults to the system's reference configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    pub norm: NormConfig,
    pub control: ControlConfig,
    #[serde(default)]
    pub design: DesignConfig,
    pub simulation: SimulationConfig,
    /// Present for second-order runs, one per `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsConfig>,
    pub initial_conditions: Vec<InitialCondition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    FlyCrane4 {
        #[serde(default)]
        params: FlyCraneParams,
    },
    PlanarTriLink {
        #[serde(default)]
        params: PlanarTriLinkParams,
    },
    LinearTall {
        /// Row-major `n x m` matrix.
        rows: Vec<Vec<f64>>,
        /// Block structure; a single dense agent block when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layout: Option<BlockLayout>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub kind: NormKind,
    /// One weight `d_b >= 1` per block (agents, then load); all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub convention: WeightConvention,
    #[serde(default)]
    pub g_variant: GVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuSource {
    /// Monte-Carlo estimate from sampled auxiliary trajectories.
    #[default]
    MonteCarlo,
    /// The certified bound `a b R / 2`.
    Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    /// One gain per block; all ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kbar: Option<Vec<f64>>,
    pub period: f64,
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub mu_source: MuSource,
    /// Scalar gain for continuous runs; the offline `k*` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignConfig {
    pub ab_samples: usize,
    pub mu_star_trajectories: usize,
    pub horizon_factor: f64,
    pub grid_fraction: f64,
    /// Samples for the two-time-scale hypothesis check (dynamic runs only).
    pub assumption_samples: usize,
}

impl Default for DesignConfig {
    fn default() -> Self {
        let aux = AuxOptions::default();
        Self {
            ab_samples: 1000,
            mu_star_trajectories: 200,
            horizon_factor: aux.horizon_factor,
            grid_fraction: aux.grid_fraction,
            assumption_samples: 500,
        }
    }
}

impl DesignConfig {
    pub fn aux_options(&self) -> AuxOptions {
        AuxOptions {
            horizon_factor: self.horizon_factor,
            grid_fraction: self.grid_fraction,
            tau_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_end: f64,
    /// Kinematic step; must divide the period and `t_end`.
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub alphas: Vec<f64>,
    #[serde(default = "unit")]
    pub agent_mass: f64,
    /// Diagonal of the load inertia.
    pub load_inertia: Vec<f64>,
    #[serde(default)]
    pub coriolis: CoriolisMode,
    /// Step for every `alpha`; defaults to the largest divisor of the period
    /// within the stiffness limit of the largest `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

/// Either an explicit offset `q0 - q^r` or a seeded uniform draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    /// Draw `q0` uniformly from the ball of this radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_radius: Option<f64>,
    /// Working-ball radius; defaults to the norm of the offset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// Concrete system built from a [`SystemConfig`]. One is built per run, so
/// the size gap between variants is not worth boxing.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SystemInstance {
    FlyCrane4(FlyCrane4<f64>),
    PlanarTriLink(PlanarTriLink<f64>),
    LinearTall(LinearTallSystem<f64>),
}

impl SystemInstance {
    pub fn as_dyn(&self) -> &dyn KinematicSystem<f64> {
        match self {
            SystemInstance::FlyCrane4(s) => s,
            SystemInstance::PlanarTriLink(s) => s,
            SystemInstance::LinearTall(s) => s,
        }
    }
}

impl SystemConfig {
    pub fn build(&self) -> Result<SystemInstance> {
        Ok(match self {
            SystemConfig::FlyCrane4 { params } => SystemInstance::FlyCrane4(FlyCrane4::new(params.clone())?),
            SystemConfig::PlanarTriLink { params } => SystemInstance::PlanarTriLink(PlanarTriLink::new(params.clone())?),
            SystemConfig::LinearTall { rows, layout } => {
                let n = rows.len();
                let m = rows.first().map_or(0, Vec::len);
                if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
                    return Err(Error::InvalidConfig(vec!["linear system rows must form a non-empty rectangular matrix".into()]));
                }
                let b = DMatrix::from_row_iterator(n, m, rows.iter().flatten().copied());
                match layout {
                    Some(l) => SystemInstance::LinearTall(LinearTallSystem::new(l.clone(), b)?),
                    None => SystemInstance::LinearTall(LinearTallSystem::dense(b)?),
                }
            }
        })
    }
}

/// Everything a scenario needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub system: SystemInstance,
    pub reference: DVector<f64>,
    pub norm: WeightedNorm<f64>,
    pub kbar: BlockGains<f64>,
    pub starts: Vec<ResolvedStart>,
    pub dynamics: Option<(DynamicParams<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct ResolvedStart {
    pub name: String,
    pub q0: DVector<f64>,
    pub ball: Ball<f64>,
}

fn divides(span: f64, dt: f64) -> bool {
    let r = span / dt;
    dt > 0.0 && (r - r.round()).abs() <= 1e-9 * r.max(1.0) && r.round() >= 1.0
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(vec![e.to_string()]))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Numeric(format!("serializing config: {e}")))
    }

    /// Step used by every dynamic run of this config.
    pub fn dynamic_dt(&self) -> Option<f64> {
        let dynamics = self.dynamics.as_ref()?;
        if let Some(dt) = dynamics.dt {
            return Some(dt);
        }
        let alpha = dynamics.alphas.iter().copied().fold(0.0, f64::max);
        let per_period = (10.0 * alpha * self.control.period * (1.0 + 1e-12)).ceil().max(1.0);
        Some(self.control.period / per_period)
    }

    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    /// Builds the system, norm, gains and starting points, collecting every
    /// problem instead of stopping at the first one.
    pub fn resolve(&self) -> Result<Resolved> {
        let mut problems = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            problems.push(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if !valid_name(&self.name) {
            problems.push(format!("name {:?} must be non-empty ASCII letters, digits, '-' or '_'", self.name));
        }
        let c = &self.control;
        if !(c.period > 0.0) {
            problems.push(format!("control.period must be positive, got {}", c.period));
        }
        if c.strategies.is_empty() {
            problems.push("control.strategies must not be empty".into());
        }
        for (i, s) in c.strategies.iter().enumerate() {
            if c.strategies[..i].contains(s) {
                problems.push(format!("control.strategies lists {s} twice"));
            }
        }
        if c.continuous_gain.is_some_and(|k| !(k > 0.0)) {
            problems.push("control.continuous_gain must be positive".into());
        }
        let d = &self.design;
        if d.ab_samples == 0 || d.mu_star_trajectories == 0 {
            problems.push("design sample counts must be positive".into());
        }
        if !(d.horizon_factor > 0.0) || !(d.grid_fraction > 0.0 && d.grid_fraction < 1.0) {
            problems.push("design.horizon_factor must be positive and design.grid_fraction in (0, 1)".into());
        }
        let s = &self.simulation;
        if !(s.t_end > 0.0) || !(s.dt > 0.0) {
            problems.push("simulation.t_end and simulation.dt must be positive".into());
        } else {
            if !divides(s.t_end, s.dt) {
                problems.push(format!("simulation.dt = {} does not divide t_end = {}", s.dt, s.t_end));
            }
            if c.period > 0.0 && !divides(c.period, s.dt) {
                problems.push(format!("simulation.dt = {} does not divide the period {}", s.dt, c.period));
            }
        }
        if let Some(dy) = &self.dynamics {
            if dy.alphas.is_empty() || dy.alphas.iter().any(|a| !(*a > 0.0)) {
                problems.push("dynamics.alphas must be a non-empty list of positive values".into());
            } else if let Some(dt) = self.dynamic_dt() {
                let alpha = dy.alphas.iter().copied().fold(0.0, f64::max);
                if dt > 1.0 / (10.0 * alpha) * (1.0 + 1e-12) {
                    problems.push(format!("dynamics.dt = {dt} exceeds the stiffness limit 1/(10 alpha) = {}", 0.1 / alpha));
                }
                if c.period > 0.0 && !divides(c.period, dt) {
                    problems.push(format!("dynamics.dt = {dt} does not divide the period {}", c.period));
                }
                if s.t_end > 0.0 && !divides(s.t_end, dt) {
                    problems.push(format!("dynamics.dt = {dt} does not divide t_end = {}", s.t_end));
                }
            }
        }
        if self.initial_conditions.is_empty() {
            problems.push("at least one initial condition is required".into());
        }

        let system = match self.system.build() {
            Ok(sys) => Some(sys),
            Err(Error::InvalidConfig(p)) => {
                problems.extend(p);
                None
            }
            Err(e) => {
                problems.push(format!("system: {e}"));
                None
            }
        };
        let Some(system) = system else {
            return Err(Error::InvalidConfig(problems));
        };
        let sys = system.as_dyn();
        let layout = sys.layout();
        let m = layout.m();
        let blocks = layout.num_blocks();

        let reference = match &self.reference {
            Some(r) if r.len() != m => {
                problems.push(format!("reference has {} entries, the system has {m} coordinates", r.len()));
                sys.reference_configuration()
            }
            Some(r) => DVector::from_column_slice(r),
            None => sys.reference_configuration(),
        };
        if let Err(e) = sys.jacobian(&reference).and_then(|a| crate::model::PseudoInverse::compute(a.dense())) {
            problems.push(format!("reference configuration is not regular: {e}"));
        }

        let weights = self.norm.weights.clone().unwrap_or_else(|| vec![1.0; blocks]);
        let norm = match WeightedNorm::with_convention(layout, weights, self.norm.kind, self.norm.convention) {
            Ok(n) => Some(n),
            Err(e) => {
                problems.push(format!("norm: {}", flatten(e)));
                None
            }
        };
        let kbar = match BlockGains::new(layout, c.kbar.clone().unwrap_or_else(|| vec![1.0; blocks])) {
            Ok(k) => Some(k),
            Err(e) => {
                problems.push(format!("control.kbar: {}", flatten(e)));
                None
            }
        };

        let dynamics = self.dynamics.as_ref().and_then(|dy| {
            match DynamicParams::uniform(layout, dy.agent_mass, &dy.load_inertia, dy.coriolis) {
                Ok(p) => Some((p, self.dynamic_dt().unwrap_or(0.0))),
                Err(e) => {
                    problems.push(format!("dynamics: {}", flatten(e)));
                    None
                }
            }
        });

        let mut starts = Vec::new();
        if let Some(norm) = &norm {
            for (idx, ic) in self.initial_conditions.iter().enumerate() {
                if !valid_name(&ic.name) {
                    problems.push(format!("initial condition name {:?} is not a valid file stem", ic.name));
                }
                if self.initial_conditions[..idx].iter().any(|o| o.name == ic.name) {
                    problems.push(format!("initial condition {:?} appears twice", ic.name));
                }
                match resolve_start(ic, idx, self.seed, &reference, norm) {
                    Ok(start) => {
                        if let SystemInstance::FlyCrane4(_) = system {
                            let limit = FlyCrane4::<f64>::pitch_limited_radius(norm, &reference);
                            if start.ball.radius > limit {
                                problems.push(format!(
                                    "initial condition {:?}: radius {} reaches the pitch limit (max {limit})",
                                    ic.name, start.ball.radius
                                ));
                            }
                        }
                        starts.push(start);
                    }
                    Err(p) => problems.push(format!("initial condition {:?}: {p}", ic.name)),
                }
            }
        }

        if !problems.is_empty() {
            return Err(Error::InvalidConfig(problems));
        }
        Ok(Resolved {
            system,
            reference,
            norm: norm.expect("checked above"),
            kbar: kbar.expect("checked above"),
            starts,
            dynamics,
        })
    }
}

fn flatten(e: Error) -> String {
    match e {
        Error::InvalidConfig(p) => p.join("; "),
        other => other.to_string(),
    }
}

fn resolve_start(
    ic: &InitialCondition,
    idx: usize,
    seed: u64,
    reference: &DVector<f64>,
    norm: &WeightedNorm<f64>,
) -> std::result::Result<ResolvedStart, String> {
    let m = reference.len();
    let (offset, radius) = match (&ic.offset, ic.random_radius) {
        (Some(_), Some(_)) => return Err("give either offset or random_radius, not both".into()),
        (None, None) => return Err("needs an offset or a random_radius".into()),
        (Some(o), None) => {
            if o.len() != m {
                return Err(format!("offset has {} entries, expected {m}", o.len()));
            }
            let e = DVector::from_column_slice(o);
            let r = ic.radius.unwrap_or_else(|| norm.norm(&e));
            (e, r)
        }
        (None, Some(r)) => {
            if !(r > 0.0) {
                return Err("random_radius must be positive".into());
            }
            let ball = Ball::new(reference.clone(), r, norm.clone()).map_err(flatten)?;
            let mut rng = stream(seed, Purpose::InitialConditions, idx as u64);
            (ball.sample_offset(&mut rng), ic.radius.unwrap_or(r))
        }
    };
    let ball = Ball::new(reference.clone(), radius, norm.clone()).map_err(flatten)?;
    let q0 = reference + offset;
    if !ball.contains_within(&q0, 1e-9) {
        return Err(format!("start lies outside its ball of radius {radius}"));
    }
    Ok(ResolvedStart {
        name: ic.name.clone(),
        q0,
        ball,
    })
}
