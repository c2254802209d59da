//! Control design and simulation for over-redundant cooperative manipulation:
//! N agents coupled to one object through a star-structured kinematic map.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controllers;
pub mod error;
pub mod experiment;
pub mod model;
pub mod ode;
pub mod rng;
pub mod scalar;
pub mod search;
pub mod sim;
pub mod systems;

pub use error::{Error, ErrorCategory, Result};
pub use scalar::Scalar;

pub type Ball = model::Ball<f64>;
pub type WeightedNorm = model::WeightedNorm<f64>;
pub type BlockJacobian = model::BlockJacobian<f64>;
pub type FlyCrane4 = systems::FlyCrane4<f64>;
pub type PlanarTriLink = systems::PlanarTriLink<f64>;
pub type LinearTallSystem = systems::LinearTallSystem<f64>;
pub type DynamicParams = systems::DynamicParams<f64>;
pub type BlockGains = controllers::BlockGains<f64>;
pub type GainSchedule = controllers::GainSchedule<f64>;
pub type OfflineDesign = controllers::OfflineDesign<f64>;
pub type BoundConstants = controllers::BoundConstants<f64>;
