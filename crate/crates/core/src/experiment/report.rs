use serde::{Deserialize, Serialize};

use super::config::MuSource;
use crate::controllers::{BoundConstants, OfflineDesign, Strategy};
use crate::error::{Error, Result};
use crate::model::NormKind;
use crate::sim::AssumptionReport;

/// Design constants for every working ball of a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub system: String,
    pub norm: NormKind,
    pub balls: Vec<BallDesign>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDesign {
    pub initial_condition: String,
    pub radius: f64,
    pub constants: BoundConstants<f64>,
    /// Design from the certified `mu`.
    pub design_mu: OfflineDesign<f64>,
    /// Design from the Monte-Carlo `mu*`.
    pub design_mu_star: OfflineDesign<f64>,
    pub mu_source: MuSource,
    /// Offline gain actually used by the runs.
    pub k_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<AssumptionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub file: String,
    pub initial_condition: String,
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub grid_points: usize,
    pub samples: usize,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub stayed_in_ball: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    pub fallbacks: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

/// Contents of `report.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub design: DesignReport,
    pub runs: Vec<RunSummary>,
}

macro_rules! toml_io {
    ($t:ty) => {
        impl $t {
            pub fn to_toml_string(&self) -> Result<String> {
                toml::to_string(self).map_err(|e| Error::Numeric(format!("serializing report: {e}")))
            }

            pub fn from_toml_str(text: &str) -> Result<Self> {
                toml::from_str(text).map_err(|e| Error::InvalidConfig(vec![format!("parsing report: {e}")]))
            }
        }
    };
}

toml_io!(DesignReport);
toml_io!(ExperimentReport);
