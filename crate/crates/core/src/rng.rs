//! Reproducible parallel random streams: one ChaCha8 stream per sample index
//! under a master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream families, so different estimators never share samples.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Purpose {
    AbBounds = 1,
    MuStar = 2,
    Assumptions = 3,
    InitialConditions = 4,
    Misc = 5,
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((purpose as u64) << 56));
    rng.set_stream(index);
    rng
}
