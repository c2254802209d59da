//! Partitioned linear-algebra substrate: block layouts, the star-structured
//! Jacobian, pseudo-inverse and projection, weighted norms and balls.

mod jacobian;
mod layout;
mod linalg;
mod norm;

pub use jacobian::{assemble_jacobian, BlockJacobian};
pub use layout::BlockLayout;
pub use linalg::{
    min_singular_value, projection, pseudo_inverse, singular_value_range, PseudoInverse,
    RANK_TOLERANCE,
};
pub use norm::{weighted_norm, Ball, NormKind, WeightConvention, WeightedNorm};
