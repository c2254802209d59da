use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BlockLayout;
use crate::scalar::Scalar;

/// Block-diagonal gain `K_bar = diag(k_1 I, .., k_N I, k_L I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGains<T: Scalar> {
    gains: Vec<T>,
    diag: DVector<T>,
}

impl<T: Scalar> BlockGains<T> {
    pub fn new(layout: &BlockLayout, gains: Vec<T>) -> Result<Self> {
        if let Some(g) = gains.iter().find(|&&g| !(g > T::zero())) {
            return Err(Error::InvalidConfig(vec![format!("block gains must be positive, got {g}")]));
        }
        let diag = DVector::from_vec(layout.expand_blocks(&gains)?);
        Ok(Self { gains, diag })
    }

    pub fn identity(layout: &BlockLayout) -> Self {
        Self::new(layout, vec![T::one(); layout.num_blocks()]).expect("unit gains are valid")
    }

    /// Per-block gains `k_1, .., k_N, k_L`.
    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    pub fn diag(&self) -> &DVector<T> {
        &self.diag
    }

    /// Diagonal of `K = k K_bar`.
    pub fn scaled(&self, k: T) -> DVector<T> {
        &self.diag * k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Continuous,
    Offline,
    Online,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Continuous => "continuous",
            Strategy::Offline => "offline",
            Strategy::Online => "online",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Strategy::Continuous),
            "offline" => Ok(Strategy::Offline),
            "online" => Ok(Strategy::Online),
            other => Err(Error::InvalidConfig(vec![format!(
                "unknown strategy `{other}` (use continuous|offline|online)"
            )])),
        }
    }
}

/// `K_bar`, the sampling period and the scalar gain `k` (continuous gain or
/// the offline `k*`; the online strategy recomputes it every period and uses
/// this value only as fallback).
#[derive(Debug, Clone, PartialEq)]
pub struct GainSchedule<T: Scalar> {
    pub kbar: BlockGains<T>,
    pub period: T,
    pub k: T,
}

impl<T: Scalar> GainSchedule<T> {
    pub fn new(kbar: BlockGains<T>, period: T, k: T) -> Result<Self> {
        let mut problems = Vec::new();
        if !(period > T::zero()) {
            problems.push(format!("sampling period must be positive, got {period}"));
        }
        if !(k > T::zero()) {
            problems.push(format!("gain k must be positive, got {k}"));
        }
        if !problems.is_empty() {
            return Err(Error::InvalidConfig(problems));
        }
        Ok(Self { kbar, period, k })
    }
}
