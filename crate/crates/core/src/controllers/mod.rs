//! Control laws and gain design: the continuous pseudo-inverse law, the
//! auxiliary error flow, the remainder-bound constants and the offline /
//! online choices of the scalar gain for sampled feedback.

mod auxiliary;
mod bounds;
mod design;
mod gains;
mod law;
mod online;

pub use auxiliary::{simulate_auxiliary, AuxFlow, AuxOptions, AuxTrajectory};
pub use bounds::{
    estimate_ab, mc_mu_star, mu_from_ab, AbEstimate, BoundConstants, MuStarEstimate, MU_STAR_TAU_FLOOR,
    SAFETY_FACTOR,
};
pub use design::{g_eval, offline_design, GVariant, OfflineDesign};
pub use gains::{BlockGains, GainSchedule, Strategy};
pub use law::{continuous_u, continuous_u_agent, error_feedback_u, offline_step_u};
pub use online::{online_step_from_error, online_step_u, OnlineStep};
